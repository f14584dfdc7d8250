#include "rloco/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rloco/bench.hpp"
#include "rloco/csv.hpp"
#include "rloco/rng.hpp"
#include "rloco/version.hpp"

namespace rloco::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
  std::string output_dir = "out";
  std::uint64_t seed = 20240601;
  bool seed_given = false;
  std::string seed_source = "default";
  int threads = 0;

  std::string model = "first-order";
  std::size_t n = 4000;
  int runs = 50;
  std::string methods = "rloco,rloco-tc,rloco-tree,rloco-ic,loco,lsv,lime";
  std::string ranking = "signed";

  std::string learner = "random-forest";
  int trees = 100;
  int min_leaf = 5;
  int max_depth = -1;
  int knn_k = 5;
  int mtry = 0;

  std::string algorithm = "affinity-propagation";
  std::string space = "importance";
  int kmeans_k = 2;
  double damping = 0.8;
  int max_leaves = 8;
  int cluster_min_leaf = 50;
  std::string assignment = "sum-of-distances";
  std::string metric = "euclidean";

  std::size_t lime_samples = 2000;
  double ridge = 1e-6;
  bool lime_discretize = false;
  std::size_t lsv_background = 128;

  std::string input;
  std::string target = "y";
  std::string task = "regression";

  std::string method = "rloco";
  long point_index = -1;
  bool deployment = false;

  std::string suite = "theorem1";
  int trials = 200;
  int p_max = 8;
  int m_max = 4;
  std::size_t verify_n = 100000;
  std::string rho_grid = "0,0.1,0.2,0.3,0.4,0.5";

  std::string k_grid = "0,1,2,3";
  bool svg = false;
  bool bench_lime_raw = false;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

LearnerSpec learner_from(const Options& opt) {
  LearnerSpec ls;
  ls.kind = learner_kind_from_string(opt.learner);
  ls.n_trees = opt.trees;
  ls.min_leaf = opt.min_leaf;
  ls.max_depth = opt.max_depth;
  ls.k = opt.knn_k;
  ls.feature_subsample = opt.mtry;
  return ls;
}

ClusterSpec cluster_from(const Options& opt) {
  ClusterSpec cs;
  if (opt.algorithm == "kmeans")
    cs.algorithm = ClusterAlgorithm::KMeans;
  else if (opt.algorithm == "affinity-propagation")
    cs.algorithm = ClusterAlgorithm::AffinityPropagation;
  else if (opt.algorithm == "variance-tree")
    cs.algorithm = ClusterAlgorithm::VarianceTree;
  else
    throw std::invalid_argument("unknown cluster algorithm: " + opt.algorithm);
  if (opt.space == "importance")
    cs.space = ClusterSpace::Importance;
  else if (opt.space == "input")
    cs.space = ClusterSpace::Input;
  else if (opt.space == "enriched-importance")
    cs.space = ClusterSpace::EnrichedImportance;
  else
    throw std::invalid_argument("unknown cluster space: " + opt.space);
  cs.k = opt.kmeans_k;
  cs.damping = opt.damping;
  cs.max_leaves = opt.max_leaves;
  cs.min_leaf = opt.cluster_min_leaf;
  cs.metric = opt.metric == "manhattan" ? DistanceMetric::Manhattan
                                        : DistanceMetric::Euclidean;
  cs.assignment = opt.assignment == "centroid" ? AssignmentRule::NearestCentroid
                                               : AssignmentRule::SumOfDistances;
  return cs;
}

json config_echo(const Options& opt, const std::string& command) {
  json j;
  j["command"] = command;
  j["output_dir"] = opt.output_dir;
  j["threads"] = opt.threads;
  j["model"] = opt.model;
  j["n"] = opt.n;
  j["runs"] = opt.runs;
  j["methods"] = opt.methods;
  j["ranking"] = opt.ranking;
  j["learner"] = opt.learner;
  j["trees"] = opt.trees;
  j["min_leaf"] = opt.min_leaf;
  j["max_depth"] = opt.max_depth;
  j["knn_k"] = opt.knn_k;
  j["mtry"] = opt.mtry;
  j["cluster_algorithm"] = opt.algorithm;
  j["cluster_space"] = opt.space;
  j["kmeans_k"] = opt.kmeans_k;
  j["damping"] = opt.damping;
  j["max_leaves"] = opt.max_leaves;
  j["cluster_min_leaf"] = opt.cluster_min_leaf;
  j["assignment"] = opt.assignment;
  j["metric"] = opt.metric;
  j["lime_samples"] = opt.lime_samples;
  j["ridge"] = opt.ridge;
  j["lime_discretize"] = opt.lime_discretize;
  j["bench_lime_raw"] = opt.bench_lime_raw;
  j["lsv_background"] = opt.lsv_background;
  j["input"] = opt.input;
  j["target"] = opt.target;
  j["task"] = opt.task;
  j["method"] = opt.method;
  j["point_index"] = opt.point_index;
  j["deployment"] = opt.deployment;
  j["suite"] = opt.suite;
  j["trials"] = opt.trials;
  j["p_max"] = opt.p_max;
  j["m_max"] = opt.m_max;
  j["verify_n"] = opt.verify_n;
  j["rho_grid"] = opt.rho_grid;
  j["k_grid"] = opt.k_grid;
  j["svg"] = opt.svg;
  return j;
}

class Manifest {
 public:
  Manifest(const Options& opt, const std::string& command)
      : dir_(opt.output_dir), start_(std::chrono::steady_clock::now()) {
    body_["command"] = command;
    body_["version"] = kVersion;
    body_["seed"] = opt.seed;
    body_["seed_source"] = opt.seed_source;
    body_["config"] = config_echo(opt, command);
    body_["warnings"] = json::array();
    body_["outputs"] = json::array();
    body_["timings_ms"] = json::object();
  }

  void warn(const std::string& w) { body_["warnings"].push_back(w); }

  void phase(const std::string& name, double ms) { body_["timings_ms"][name] = ms; }

  void write_output(const std::string& name, const std::string& content) {
    fs::create_directories(dir_);
    std::ofstream out(fs::path(dir_) / name, std::ios::binary);
    out << content;
    body_["outputs"].push_back(name);
  }

  void finish(const std::string& status) {
    body_["status"] = status;
    auto ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - start_)
                  .count();
    body_["timings_ms"]["total"] = ms;
    fs::create_directories(dir_);
    std::ofstream out(fs::path(dir_) / "manifest.json", std::ios::binary);
    out << body_.dump(2) << "\n";
  }

 private:
  std::string dir_;
  std::chrono::steady_clock::time_point start_;
  json body_;
};

class PhaseTimer {
 public:
  PhaseTimer(Manifest& m, std::string name)
      : m_(m), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}
  ~PhaseTimer() {
    m_.phase(name_, std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start_)
                        .count());
  }

 private:
  Manifest& m_;
  std::string name_;
  std::chrono::steady_clock::time_point start_;
};

std::string render_csv(const Dataset& data, const std::string& target_name) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t j = 0; j < data.p(); ++j) os << data.feature_names[j] << ',';
  os << target_name << "\n";
  for (std::size_t i = 0; i < data.n(); ++i) {
    auto row = data.features.row(i);
    for (std::size_t j = 0; j < data.p(); ++j) os << row[j] << ',';
    os << data.target[i] << "\n";
  }
  return os.str();
}

json attribution_json(const AttributionVector& attr,
                      const std::vector<std::string>& names) {
  json j;
  j["method"] = attr.method;
  json scores = json::object();
  for (std::size_t i = 0; i < attr.scores.size(); ++i)
    scores[names[i]] = attr.scores[i];
  j["scores"] = std::move(scores);
  NormalizedAttribution norm = normalize(attr);
  json normalized = json::object();
  for (std::size_t i = 0; i < norm.values.size(); ++i)
    normalized[names[i]] = norm.values[i];
  j["normalized"] = std::move(normalized);
  j["degenerate_normalization"] = norm.degenerate;
  return j;
}

int cmd_synth(const Options& opt) {
  Manifest manifest(opt, "synth");
  SyntheticSpec spec;
  spec.model = model_id_from_string(opt.model);
  spec.p = model_dim(spec.model);
  spec.n = opt.n;
  spec.seed = opt.seed;
  SyntheticData gen = generate(spec);

  manifest.write_output("data.csv", render_csv(gen.data, "y"));
  json truth;
  truth["excluded"] = gen.truth.excluded;
  truth["metric_k"] = gen.metric_k;
  truth["importance_convention"] = gen.truth.importance_convention;
  truth["active_sets"] = gen.truth.active_sets;
  truth["regime"] = gen.truth.regime;
  manifest.write_output("ground_truth.json", truth.dump(2) + "\n");
  if (gen.pwl.has_value())
    manifest.write_output("model.json", gen.pwl->to_json() + "\n");
  manifest.finish("ok");
  return kExitOk;
}

int cmd_bench(const Options& opt) {
  Manifest manifest(opt, "bench");
  BenchmarkConfig cfg;
  cfg.model = model_id_from_string(opt.model);
  for (const std::string& name : split_list(opt.methods))
    cfg.methods.push_back(parse_method(name));
  cfg.runs = opt.runs;
  cfg.n = opt.n;
  cfg.seed = opt.seed;
  cfg.learner = learner_from(opt);
  cfg.lime_samples = opt.lime_samples;
  cfg.lime_discretize = !opt.bench_lime_raw;
  cfg.lsv_background = opt.lsv_background;
  cfg.ranking = opt.ranking == "magnitude" ? RankingConvention::Magnitude
                                           : RankingConvention::Signed;
  cfg.threads = opt.threads;

  BenchmarkReport report;
  {
    PhaseTimer timer(manifest, "benchmark");
    report = run_synthetic_benchmark(cfg);
  }
  for (const MethodAggregate& m : report.methods)
    for (const std::string& f : m.failure_messages)
      manifest.warn(m.name + ": " + f);
  manifest.write_output("bench.tsv", report.to_tsv());
  manifest.write_output("bench.json", report.to_json() + "\n");
  std::cout << report.to_tsv();
  manifest.finish("ok");
  return kExitOk;
}

int cmd_verify(const Options& opt) {
  Manifest manifest(opt, "verify");
  json report;
  std::ostringstream text;
  if (opt.suite == "theorem1") {
    Theorem1Report r = verify_theorem1(opt.trials, opt.p_max, opt.m_max, opt.seed);
    report["suite"] = "theorem1";
    report["trials"] = r.trials;
    report["max_discrepancy"] = r.max_discrepancy;
    report["max_efficiency_gap"] = r.max_efficiency_gap;
    report["switch_ratio"] = r.switch_ratio;
    report["switch_ratio_spread"] = r.switch_ratio_spread;
    text << "closed form vs enumeration over " << r.trials
         << " random models: max discrepancy " << r.max_discrepancy
         << "\nmax efficiency gap " << r.max_efficiency_gap
         << "\nswitch-model ratio " << r.switch_ratio << " (spread "
         << r.switch_ratio_spread << ")\n";
  } else if (opt.suite == "centroids") {
    CentroidReport r = verify_centroids(opt.verify_n, opt.seed);
    report["suite"] = "centroids";
    report["n"] = r.n;
    report["input_a"] = r.input_a;
    report["input_b"] = r.input_b;
    report["importance_a"] = r.importance_a;
    report["importance_b"] = r.importance_b;
    report["separating"] = r.separating;
    report["linf_input_a"] = r.linf_input_a;
    report["linf_input_b"] = r.linf_input_b;
    report["linf_importance_a"] = r.linf_importance_a;
    report["linf_importance_b"] = r.linf_importance_b;
    text << "input-space centroid deviations: " << r.linf_input_a << ", "
         << r.linf_input_b << "\nimportance-space centroid deviations: "
         << r.linf_importance_a << ", " << r.linf_importance_b << "\n";
  } else if (opt.suite == "contamination") {
    std::vector<double> grid;
    for (const std::string& s : split_list(opt.rho_grid))
      grid.push_back(std::stod(s));
    ContaminationReport r = contamination_experiment(grid, 20000, opt.seed);
    report["suite"] = "contamination";
    report["rho"] = r.rho;
    report["bias"] = r.bias;
    report["slope"] = r.slope;
    report["r2"] = r.r2;
    text << "contamination bias slope " << r.slope << ", linear fit R2 " << r.r2
         << "\n";
  } else {
    throw CLI::ValidationError("--suite", "unknown suite: " + opt.suite);
  }
  manifest.write_output("report.json", report.dump(2) + "\n");
  manifest.write_output("report.txt", text.str());
  std::cout << text.str();
  manifest.finish("ok");
  return kExitOk;
}

struct LoadedData {
  Dataset data;
  SplitIndices split;
  Dataset fit_ds;
  Dataset calib_ds;
  Dataset test_ds;
};

LoadedData load_and_split(const Options& opt, Manifest& manifest) {
  LoadedData out;
  if (!opt.input.empty()) {
    TaskKind task = opt.task == "classification" ? TaskKind::BinaryClassification
                                                 : TaskKind::Regression;
    out.data = ingest_csv(opt.input, opt.target, task);
  } else {
    SyntheticSpec spec;
    spec.model = model_id_from_string(opt.model);
    spec.p = model_dim(spec.model);
    spec.n = opt.n;
    spec.seed = opt.seed;
    out.data = generate(spec).data;
    manifest.warn("no --input given; using the synthetic model " + opt.model);
  }
  out.split = make_benchmark_split(out.data.n(), opt.seed);
  out.fit_ds = out.data.subset(out.split.fit);
  out.calib_ds = out.data.subset(out.split.calibration);
  out.test_ds = out.data.subset(out.split.test);
  return out;
}

int cmd_explain(const Options& opt) {
  Manifest manifest(opt, "explain");
  if (opt.input.empty())
    throw CLI::ValidationError("--input", "explain requires an input CSV");
  LoadedData ld = load_and_split(opt, manifest);
  if (opt.point_index < 0 ||
      static_cast<std::size_t>(opt.point_index) >= ld.data.n())
    throw CLI::ValidationError("--point-index", "point index out of range");

  auto x = ld.data.features.row(static_cast<std::size_t>(opt.point_index));
  std::optional<double> y;
  if (!opt.deployment)
    y = ld.data.target[static_cast<std::size_t>(opt.point_index)];

  LearnerSpec learner = learner_from(opt);
  learner.seed = derive_seed(opt.seed, "learner");

  json out;
  out["point_index"] = opt.point_index;

  MethodSpec mspec = parse_method(opt.method);
  if (mspec.kind == MethodSpec::Kind::Rloco) {
    ClusterSpec cs = mspec.cluster;
    ClusterSpec overrides = cluster_from(opt);
    cs.metric = overrides.metric;
    cs.assignment = overrides.assignment;
    cs.seed = derive_seed(opt.seed, "cluster");
    if (mspec.cluster.algorithm == ClusterAlgorithm::OracleRegions)
      throw CLI::ValidationError("--method",
                                 "rloco-tc needs ground-truth regions; "
                                 "use the bench command");
    RlocoPipeline pipe;
    {
      PhaseTimer timer(manifest, "fit");
      pipe = fit_rloco(ld.fit_ds, ld.calib_ds, learner, cs, opt.threads);
    }
    RlocoExplanation expl = explain_rloco(pipe, x, y);
    out.update(attribution_json(expl.attribution, ld.data.feature_names));
    out["cluster"] = expl.cluster;
    out["undecidable"] = expl.undecidable;
    out["target_mode"] =
        expl.mode == TargetMode::Benchmark ? "benchmark" : "deployment";
    manifest.write_output("partition.json",
                          pipe.partition.to_json(ld.data.feature_names) + "\n");
    manifest.write_output("importance.tsv",
                          pipe.calibration_repr.to_tsv(ld.data.feature_names));
    if (!pipe.partition.tree_rules.empty())
      manifest.write_output("tree_rules.txt", pipe.partition.tree_rules);
    for (const std::string& w : pipe.partition.warnings) manifest.warn(w);
  } else if (mspec.kind == MethodSpec::Kind::Loco) {
    LocoModels models;
    {
      PhaseTimer timer(manifest, "fit");
      models = fit_loco(ld.fit_ds, learner, opt.threads);
    }
    ConformityScore score{ld.data.task == TaskKind::BinaryClassification
                              ? ConformityKind::Accuracy
                              : ConformityKind::RSquared,
                          models.sigma2_fit};
    ImportanceRepresentation repr = delta_scores(models, ld.calib_ds, score);
    out.update(attribution_json(global_psi(repr), ld.data.feature_names));
    manifest.write_output("importance.tsv", repr.to_tsv(ld.data.feature_names));
  } else {
    Predictor f0;
    {
      PhaseTimer timer(manifest, "fit");
      f0 = fit(learner, ld.fit_ds);
    }
    Evaluator f = [&f0](std::span<const double> z) { return f0.predict(z); };
    if (mspec.kind == MethodSpec::Kind::Lsv) {
      ShapleyConfig sc;
      sc.mode = ShapleyMode::MonteCarlo;
      sc.mc_samples_per_subset = opt.lsv_background;
      sc.seed = derive_seed(opt.seed, "lsv");
      out.update(attribution_json(
          lsv_monte_carlo(f, ld.calib_ds.features, x, sc), ld.data.feature_names));
    } else {
      LimeConfig lc;
      lc.num_samples = opt.lime_samples;
      lc.ridge_penalty = opt.ridge;
      lc.discretize = opt.lime_discretize;
      lc.seed = derive_seed(opt.seed, "lime");
      LimeExplanation e = explain_lime(f, ld.calib_ds, x, lc);
      out.update(attribution_json(e.attribution, ld.data.feature_names));
      out["intercept"] = e.intercept;
      out["bandwidth"] = e.bandwidth;
    }
  }
  manifest.write_output("explanation.json", out.dump(2) + "\n");
  std::cout << out.dump(2) << "\n";
  manifest.finish("ok");
  return kExitOk;
}

int cmd_mask_eval(const Options& opt) {
  Manifest manifest(opt, "mask-eval");
  LoadedData ld = load_and_split(opt, manifest);

  LearnerSpec learner = learner_from(opt);
  learner.seed = derive_seed(opt.seed, "learner");
  Predictor f0;
  {
    PhaseTimer timer(manifest, "fit");
    f0 = fit(learner, ld.fit_ds);
  }
  Evaluator f = [&f0](std::span<const double> z) { return f0.predict(z); };

  std::vector<int> k_grid;
  for (const std::string& s : split_list(opt.k_grid)) k_grid.push_back(std::stoi(s));

  std::vector<std::pair<std::string, RowExplainer>> explainers;
  std::vector<std::shared_ptr<RlocoPipeline>> pipes;
  std::optional<AttributionVector> psi;
  std::optional<LimeExplainer> lime_explainer;

  for (const std::string& name : split_list(opt.methods)) {
    MethodSpec mspec = parse_method(name);
    switch (mspec.kind) {
      case MethodSpec::Kind::Rloco: {
        if (mspec.cluster.algorithm == ClusterAlgorithm::OracleRegions) {
          manifest.warn("skipping " + mspec.name +
                        ": ground-truth regions are bench-only");
          break;
        }
        ClusterSpec cs = mspec.cluster;
        cs.seed = derive_seed(opt.seed, "cluster-" + mspec.name);
        auto pipe = std::make_shared<RlocoPipeline>(
            fit_rloco(ld.fit_ds, ld.calib_ds, learner, cs, opt.threads));
        pipes.push_back(pipe);
        explainers.emplace_back(mspec.name, [pipe, &ld](std::size_t row) {
          auto xr = ld.test_ds.features.row(row);
          return explain_rloco(*pipe, xr, ld.test_ds.target[row]).attribution;
        });
        break;
      }
      case MethodSpec::Kind::Loco: {
        if (!psi.has_value()) {
          LocoModels models = !pipes.empty() ? pipes.front()->models
                                             : fit_loco(ld.fit_ds, learner,
                                                        opt.threads);
          ConformityScore score{ld.data.task == TaskKind::BinaryClassification
                                    ? ConformityKind::Accuracy
                                    : ConformityKind::RSquared,
                                models.sigma2_fit};
          psi = global_psi(delta_scores(models, ld.calib_ds, score));
        }
        explainers.emplace_back(mspec.name,
                                [&](std::size_t) { return *psi; });
        break;
      }
      case MethodSpec::Kind::Lsv: {
        explainers.emplace_back(mspec.name, [&, f](std::size_t row) {
          ShapleyConfig sc;
          sc.mode = ShapleyMode::MonteCarlo;
          sc.mc_samples_per_subset = opt.lsv_background;
          sc.seed = derive_seed(opt.seed, "lsv", row);
          return lsv_monte_carlo(f, ld.calib_ds.features,
                                 ld.test_ds.features.row(row), sc);
        });
        break;
      }
      case MethodSpec::Kind::Lime: {
        if (!lime_explainer.has_value()) {
          LimeConfig lc;
          lc.num_samples = opt.lime_samples;
          lc.ridge_penalty = opt.ridge;
          lc.discretize = opt.lime_discretize;
          lime_explainer.emplace(ld.calib_ds, lc);
        }
        explainers.emplace_back(mspec.name, [&, f](std::size_t row) {
          return lime_explainer
              ->explain(f, ld.test_ds.features.row(row),
                        derive_seed(opt.seed, "lime", row))
              .attribution;
        });
        break;
      }
    }
  }

  MaskingReport report;
  {
    PhaseTimer timer(manifest, "mask-eval");
    report = mask_eval(ld.test_ds, f0, explainers, k_grid);
  }
  manifest.write_output("masking.tsv", report.to_tsv());
  manifest.write_output("masking.json", report.to_json() + "\n");
  if (opt.svg) manifest.write_output("masking.svg", report.to_svg());
  std::cout << report.to_tsv();
  manifest.finish("ok");
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  Options opt;
  CLI::App app{"Regional leave-one-covariate-out attribution toolkit"};
  app.set_config("--config")->description(
      "key=value config file with [subcommand] sections; flags win");
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", opt.output_dir, "output directory");
    cmd->add_option("--seed", opt.seed, "root RNG seed")
        ->each([&](const std::string&) {
          opt.seed_given = true;
          opt.seed_source = "flag-or-config";
        });
    cmd->add_option("--threads", opt.threads, "worker threads (0 = auto)");
  };
  auto add_learner = [&](CLI::App* cmd) {
    cmd->add_option("--learner", opt.learner,
                    "random-forest | regression-tree | k-nearest | "
                    "linear-least-squares");
    cmd->add_option("--trees", opt.trees, "forest size");
    cmd->add_option("--min-leaf", opt.min_leaf, "minimum leaf size");
    cmd->add_option("--max-depth", opt.max_depth, "tree depth cap (-1 = none)");
    cmd->add_option("--knn-k", opt.knn_k, "k for k-nearest");
    cmd->add_option("--mtry", opt.mtry, "features per split (0 = default)");
  };
  auto add_cluster = [&](CLI::App* cmd) {
    cmd->add_option("--cluster-algorithm", opt.algorithm,
                    "kmeans | affinity-propagation | variance-tree");
    cmd->add_option("--cluster-space", opt.space,
                    "importance | input | enriched-importance");
    cmd->add_option("--kmeans-k", opt.kmeans_k, "kmeans cluster count");
    cmd->add_option("--damping", opt.damping, "affinity propagation damping");
    cmd->add_option("--max-leaves", opt.max_leaves, "variance-tree leaves");
    cmd->add_option("--cluster-min-leaf", opt.cluster_min_leaf,
                    "variance-tree minimum leaf size");
    cmd->add_option("--assignment", opt.assignment,
                    "sum-of-distances | centroid");
    cmd->add_option("--metric", opt.metric, "euclidean | manhattan");
  };
  auto add_methods = [&](CLI::App* cmd) {
    cmd->add_option("--methods", opt.methods, "comma list of methods");
    cmd->add_option("--lime-samples", opt.lime_samples, "LIME perturbations");
    cmd->add_option("--ridge", opt.ridge, "LIME ridge penalty");
    cmd->add_flag("--lime-discretize", opt.lime_discretize,
                  "quantile-bin LIME surrogate");
    cmd->add_option("--lsv-background", opt.lsv_background,
                    "background rows per Shapley value function");
  };

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  add_common(synth);
  synth->add_option("--model", opt.model,
                    "first-order | second-order | second-order-interaction");
  synth->add_option("--n", opt.n, "sample size");

  CLI::App* explain = app.add_subcommand("explain", "explain one observation");
  add_common(explain);
  add_learner(explain);
  add_cluster(explain);
  add_methods(explain);
  explain->add_option("--input", opt.input, "input CSV path");
  explain->add_option("--target", opt.target, "target column name");
  explain->add_option("--task", opt.task, "regression | classification");
  explain->add_option("--method", opt.method, "attribution method");
  explain->add_option("--point-index", opt.point_index, "row to explain");
  explain->add_flag("--deployment", opt.deployment,
                    "ignore the point's label (substitute the prediction)");

  CLI::App* bench = app.add_subcommand("bench", "synthetic benchmark");
  add_common(bench);
  add_learner(bench);
  add_methods(bench);
  bench->add_option("--model", opt.model, "synthetic model id");
  bench->add_option("--n", opt.n, "per-run sample size");
  bench->add_option("--runs", opt.runs, "number of seeded runs");
  bench->add_option("--ranking", opt.ranking, "signed | magnitude");
  bench->add_flag("--bench-lime-raw", opt.bench_lime_raw,
                  "use raw-space LIME in the benchmark instead of the "
                  "discretized reference behavior");

  CLI::App* verify = app.add_subcommand("verify", "verification suites");
  add_common(verify);
  verify->add_option("--suite", opt.suite,
                     "theorem1 | centroids | contamination");
  verify->add_option("--trials", opt.trials, "random models (theorem1)");
  verify->add_option("--p-max", opt.p_max, "max dimension (theorem1)");
  verify->add_option("--m-max", opt.m_max, "max regions (theorem1)");
  verify->add_option("--n", opt.verify_n, "sample size (centroids)");
  verify->add_option("--rho-grid", opt.rho_grid, "contamination fractions");

  CLI::App* mask = app.add_subcommand("mask-eval", "zero-masking evaluation");
  add_common(mask);
  add_learner(mask);
  add_cluster(mask);
  add_methods(mask);
  mask->add_option("--input", opt.input, "input CSV (default: synthetic)");
  mask->add_option("--target", opt.target, "target column name");
  mask->add_option("--task", opt.task, "regression | classification");
  mask->add_option("--model", opt.model, "synthetic model when no input");
  mask->add_option("--n", opt.n, "synthetic sample size");
  mask->add_option("--k-grid", opt.k_grid, "comma list of k values");
  mask->add_flag("--svg", opt.svg, "emit an SVG plot");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  if (!opt.seed_given) {
    if (const char* env = std::getenv("RLOCO_SEED")) {
      opt.seed = std::strtoull(env, nullptr, 10);
      opt.seed_source = "env:RLOCO_SEED";
    }
  }

  try {
    if (synth->parsed()) return cmd_synth(opt);
    if (explain->parsed()) return cmd_explain(opt);
    if (bench->parsed()) return cmd_bench(opt);
    if (verify->parsed()) return cmd_verify(opt);
    if (mask->parsed()) return cmd_mask_eval(opt);
    std::cerr << app.help();
    return kExitUsage;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CsvError& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind) {
      case CsvError::Kind::MissingHeader: return kExitCsvHeader;
      case CsvError::Kind::NonNumericCell: return kExitCsvCell;
      case CsvError::Kind::MissingTarget: return kExitCsvTarget;
    }
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    Manifest failed(opt, "failed");
    failed.warn(e.what());
    failed.finish("error");
    return kExitRuntime;
  }
}

}  // namespace rloco::cli
