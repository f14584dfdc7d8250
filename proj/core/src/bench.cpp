#include "rloco/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "rloco/rng.hpp"

namespace rloco {

namespace {

std::string format_rate(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

MethodSpec method_lsv() {
  MethodSpec m;
  m.kind = MethodSpec::Kind::Lsv;
  m.name = "L-SV";
  return m;
}

MethodSpec method_lime() {
  MethodSpec m;
  m.kind = MethodSpec::Kind::Lime;
  m.name = "LIME";
  return m;
}

MethodSpec method_loco() {
  MethodSpec m;
  m.kind = MethodSpec::Kind::Loco;
  m.name = "LOCO";
  return m;
}

MethodSpec method_rloco_affinity(double damping) {
  MethodSpec m;
  m.kind = MethodSpec::Kind::Rloco;
  m.name = damping == 0.8 ? "R-LOCO"
                          : "R-LOCO_Affinity-" + format_rate(damping).substr(0, 3);
  m.cluster.algorithm = ClusterAlgorithm::AffinityPropagation;
  m.cluster.damping = damping;
  return m;
}

MethodSpec method_rloco_tc() {
  MethodSpec m;
  m.kind = MethodSpec::Kind::Rloco;
  m.name = "R-LOCO_TC";
  m.cluster.algorithm = ClusterAlgorithm::OracleRegions;
  m.oracle_assign = true;
  return m;
}

MethodSpec method_rloco_tree() {
  MethodSpec m;
  m.kind = MethodSpec::Kind::Rloco;
  m.name = "R-LOCO_tree";
  m.cluster.algorithm = ClusterAlgorithm::VarianceTree;
  return m;
}

MethodSpec method_rloco_ic() {
  MethodSpec m;
  m.kind = MethodSpec::Kind::Rloco;
  m.name = "R-LOCO_IC";
  m.cluster.algorithm = ClusterAlgorithm::AffinityPropagation;
  m.cluster.space = ClusterSpace::Input;
  return m;
}

MethodSpec method_rloco_kmeans(int k) {
  MethodSpec m;
  m.kind = MethodSpec::Kind::Rloco;
  m.name = "R-LOCO_KMeans-" + std::to_string(k);
  m.cluster.algorithm = ClusterAlgorithm::KMeans;
  m.cluster.k = k;
  return m;
}

MethodSpec parse_method(const std::string& name) {
  if (name == "lsv") return method_lsv();
  if (name == "lime") return method_lime();
  if (name == "loco") return method_loco();
  if (name == "rloco") return method_rloco_affinity();
  if (name == "rloco-tc") return method_rloco_tc();
  if (name == "rloco-tree") return method_rloco_tree();
  if (name == "rloco-ic") return method_rloco_ic();
  const std::string kmeans_prefix = "rloco-kmeans-";
  if (name.rfind(kmeans_prefix, 0) == 0)
    return method_rloco_kmeans(std::stoi(name.substr(kmeans_prefix.size())));
  const std::string affinity_prefix = "rloco-affinity-";
  if (name.rfind(affinity_prefix, 0) == 0)
    return method_rloco_affinity(std::stod(name.substr(affinity_prefix.size())));
  if (name == "rloco-enriched") {
    MethodSpec m = method_rloco_affinity();
    m.name = "R-LOCO_enriched";
    m.cluster.space = ClusterSpace::EnrichedImportance;
    return m;
  }
  throw std::invalid_argument("unknown method: " + name);
}

namespace {

struct RunOutcome {
  std::vector<std::optional<RankingMetrics>> metrics;  // per method
  std::vector<std::string> errors;                     // per method, empty = ok
};

RunOutcome execute_run(const BenchmarkConfig& cfg, int run_idx) {
  const std::uint64_t seed_r = derive_seed(cfg.seed, "run",
                                           static_cast<std::uint64_t>(run_idx));
  SyntheticSpec sspec;
  sspec.model = cfg.model;
  sspec.p = model_dim(cfg.model);
  sspec.n = cfg.n;
  sspec.seed = seed_r;
  const SyntheticData gen = generate(sspec);
  const std::size_t p = gen.data.p();

  const SplitIndices split = make_benchmark_split(cfg.n, seed_r);
  const Dataset fit_ds = gen.data.subset(split.fit);
  const Dataset calib_ds = gen.data.subset(split.calibration);
  const std::size_t n_test = split.test.size();

  std::vector<std::vector<int>> truth_test(n_test);
  for (std::size_t i = 0; i < n_test; ++i)
    truth_test[i] = gen.truth.active_sets[static_cast<std::size_t>(split.test[i])];

  bool needs_loco = false, needs_enriched = false;
  for (const MethodSpec& m : cfg.methods) {
    if (m.kind == MethodSpec::Kind::Loco || m.kind == MethodSpec::Kind::Rloco)
      needs_loco = true;
    if (m.kind == MethodSpec::Kind::Rloco &&
        m.cluster.space == ClusterSpace::EnrichedImportance)
      needs_enriched = true;
  }

  LocoModels models;
  ConformityScore score{ConformityKind::RSquared, 1.0};
  ImportanceRepresentation calib_repr;
  Matrix test_deltas, test_signed;
  if (needs_loco) {
    LearnerSpec ls = cfg.learner;
    ls.seed = derive_seed(seed_r, "learner");
    models = fit_loco(fit_ds, ls, 1);
    score.sigma2 = models.sigma2_fit;
    calib_repr = delta_scores(models, calib_ds, score, needs_enriched);
    test_deltas = Matrix(n_test, p);
    test_signed = Matrix(n_test, p);
    for (std::size_t i = 0; i < n_test; ++i) {
      auto x = gen.data.features.row(static_cast<std::size_t>(split.test[i]));
      PointImportance pi = point_importance(
          models, x, gen.data.target[static_cast<std::size_t>(split.test[i])],
          score);
      for (std::size_t j = 0; j < p; ++j) {
        test_deltas(i, j) = pi.deltas[j];
        test_signed(i, j) = pi.signed_residuals[j];
      }
    }
  }

  RunOutcome out;
  out.metrics.resize(cfg.methods.size());
  out.errors.resize(cfg.methods.size());

  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    const MethodSpec& m = cfg.methods[mi];
    try {
      std::vector<AttributionVector> attrs(n_test);
      switch (m.kind) {
        case MethodSpec::Kind::Loco: {
          AttributionVector psi = global_psi(calib_repr);
          for (auto& a : attrs) a = psi;
          break;
        }
        case MethodSpec::Kind::Rloco: {
          ClusterSpec cs = m.cluster;
          cs.seed = derive_seed(seed_r, "cluster-" + m.name);
          Matrix space;
          switch (cs.space) {
            case ClusterSpace::Importance: space = calib_repr.deltas; break;
            case ClusterSpace::Input: space = calib_ds.features; break;
            case ClusterSpace::EnrichedImportance:
              space = calib_repr.concatenated();
              break;
          }
          if (cs.algorithm == ClusterAlgorithm::OracleRegions) {
            cs.oracle_labels.resize(split.calibration.size());
            for (std::size_t i = 0; i < split.calibration.size(); ++i)
              cs.oracle_labels[i] =
                  gen.truth.regime[static_cast<std::size_t>(split.calibration[i])];
          }
          RegionPartition part = cluster(space, cs);
          fill_regional_attributions(part, calib_repr);

          // regime -> cluster map for the oracle-assign control
          std::vector<int> regime_to_cluster;
          if (m.oracle_assign) {
            int max_regime = 0;
            for (int r : gen.truth.regime) max_regime = std::max(max_regime, r);
            regime_to_cluster.assign(static_cast<std::size_t>(max_regime) + 1, -1);
            for (std::size_t i = 0; i < split.calibration.size(); ++i) {
              int regime =
                  gen.truth.regime[static_cast<std::size_t>(split.calibration[i])];
              regime_to_cluster[static_cast<std::size_t>(regime)] =
                  part.assignments[i];
            }
          }

          std::vector<double> repr;
          for (std::size_t i = 0; i < n_test; ++i) {
            int label = -1;
            if (m.oracle_assign) {
              int regime = gen.truth.regime[static_cast<std::size_t>(split.test[i])];
              label = regime_to_cluster[static_cast<std::size_t>(regime)];
            }
            if (label < 0) {
              switch (cs.space) {
                case ClusterSpace::Importance: {
                  auto r = test_deltas.row(i);
                  repr.assign(r.begin(), r.end());
                  break;
                }
                case ClusterSpace::Input: {
                  auto r = gen.data.features.row(
                      static_cast<std::size_t>(split.test[i]));
                  repr.assign(r.begin(), r.end());
                  break;
                }
                case ClusterSpace::EnrichedImportance: {
                  auto d = test_deltas.row(i);
                  auto s = test_signed.row(i);
                  repr.assign(d.begin(), d.end());
                  repr.insert(repr.end(), s.begin(), s.end());
                  break;
                }
              }
              label = assign(part, repr).label;
            }
            auto row = part.regional_attributions.row(static_cast<std::size_t>(label));
            attrs[i].scores.assign(row.begin(), row.end());
            attrs[i].method = m.name;
          }
          break;
        }
        case MethodSpec::Kind::Lsv: {
          for (std::size_t i = 0; i < n_test; ++i) {
            ShapleyConfig sc;
            sc.mode = ShapleyMode::MonteCarlo;
            sc.mc_samples_per_subset = cfg.lsv_background;
            sc.seed = derive_seed(seed_r, "lsv", i);
            attrs[i] = lsv_monte_carlo(
                gen.evaluator, calib_ds.features,
                gen.data.features.row(static_cast<std::size_t>(split.test[i])), sc);
          }
          break;
        }
        case MethodSpec::Kind::Lime: {
          LimeConfig lc;
          lc.num_samples = cfg.lime_samples;
          lc.discretize = cfg.lime_discretize;
          LimeExplainer explainer(calib_ds, lc);
          for (std::size_t i = 0; i < n_test; ++i)
            attrs[i] = explainer
                           .explain(gen.evaluator,
                                    gen.data.features.row(
                                        static_cast<std::size_t>(split.test[i])),
                                    derive_seed(seed_r, "lime", i))
                           .attribution;
          break;
        }
      }
      out.metrics[mi] = ranking_metrics(attrs, truth_test, gen.metric_k,
                                        gen.truth.excluded, cfg.ranking);
    } catch (const std::exception& e) {
      out.errors[mi] = e.what();
    }
  }
  return out;
}

}  // namespace

BenchmarkReport run_synthetic_benchmark(const BenchmarkConfig& cfg) {
  if (cfg.runs < 1) throw std::invalid_argument("benchmark: runs >= 1");
  if (cfg.methods.empty()) throw std::invalid_argument("benchmark: no methods");

  std::vector<RunOutcome> outcomes(static_cast<std::size_t>(cfg.runs));
  int threads = cfg.threads > 0
                    ? cfg.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, cfg.runs));

  std::atomic<int> next{0};
  std::exception_ptr fail;
  std::mutex fail_mu;
  auto worker = [&] {
    for (int r = next.fetch_add(1); r < cfg.runs; r = next.fetch_add(1)) {
      try {
        outcomes[static_cast<std::size_t>(r)] = execute_run(cfg, r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(fail_mu);
        if (!fail) fail = std::current_exception();
        return;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (fail) std::rethrow_exception(fail);

  BenchmarkReport report;
  report.model = to_string(cfg.model);
  report.runs = cfg.runs;
  report.n = cfg.n;
  report.seed = cfg.seed;
  report.ranking =
      cfg.ranking == RankingConvention::Signed ? "signed" : "magnitude";

  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    MethodAggregate agg;
    agg.name = cfg.methods[mi].name;
    RankingMetrics mean{};
    int ok = 0;
    for (int r = 0; r < cfg.runs; ++r) {
      const RunOutcome& oc = outcomes[static_cast<std::size_t>(r)];
      if (oc.metrics[mi].has_value()) {
        const RankingMetrics& mm = *oc.metrics[mi];
        agg.per_run.push_back(mm);
        mean.tp_rate += mm.tp_rate;
        mean.fp_rate += mm.fp_rate;
        mean.ni_mean += mm.ni_mean;
        mean.ni_q10 += mm.ni_q10;
        mean.ni_q95 += mm.ni_q95;
        ++ok;
      } else {
        ++agg.failed_runs;
        agg.failure_messages.push_back("run " + std::to_string(r) + ": " +
                                       oc.errors[mi]);
      }
    }
    if (ok > 0) {
      mean.tp_rate /= ok;
      mean.fp_rate /= ok;
      mean.ni_mean /= ok;
      mean.ni_q10 /= ok;
      mean.ni_q95 /= ok;
    }
    agg.mean = mean;
    report.methods.push_back(std::move(agg));
  }
  return report;
}

std::string BenchmarkReport::to_tsv() const {
  std::ostringstream os;
  os << "Method\tTP\tFP\tNI_mean\tNI_q0.1\tNI_q0.95\n";
  for (const MethodAggregate& m : methods)
    os << m.name << '\t' << format_rate(m.mean.tp_rate) << '\t'
       << format_rate(m.mean.fp_rate) << '\t' << format_rate(m.mean.ni_mean)
       << '\t' << format_rate(m.mean.ni_q10) << '\t'
       << format_rate(m.mean.ni_q95) << '\n';
  return os.str();
}

std::string BenchmarkReport::to_json() const {
  nlohmann::json j;
  j["model"] = model;
  j["runs"] = runs;
  j["n"] = n;
  j["seed"] = seed;
  j["ranking"] = ranking;
  j["tp_aggregation"] =
      "per-observation mean within run, then mean across runs";
  nlohmann::json jm = nlohmann::json::array();
  for (const MethodAggregate& m : methods) {
    nlohmann::json e;
    e["name"] = m.name;
    e["tp"] = m.mean.tp_rate;
    e["fp"] = m.mean.fp_rate;
    e["ni_mean"] = m.mean.ni_mean;
    e["ni_q10"] = m.mean.ni_q10;
    e["ni_q95"] = m.mean.ni_q95;
    e["failed_runs"] = m.failed_runs;
    e["failures"] = m.failure_messages;
    nlohmann::json runs_j = nlohmann::json::array();
    for (const RankingMetrics& r : m.per_run)
      runs_j.push_back({{"tp", r.tp_rate},
                        {"fp", r.fp_rate},
                        {"ni_mean", r.ni_mean},
                        {"ni_q10", r.ni_q10},
                        {"ni_q95", r.ni_q95}});
    e["per_run"] = std::move(runs_j);
    jm.push_back(std::move(e));
  }
  j["methods"] = std::move(jm);
  return j.dump(2);
}

Theorem1Report verify_theorem1(int trials, int p_max, int m_max,
                               std::uint64_t seed) {
  if (p_max < 2 || p_max > 12)
    throw std::invalid_argument("verify_theorem1: p_max in [2, 12]");
  Theorem1Report rep;
  rep.trials = trials;

  for (int t = 0; t < trials; ++t) {
    Rng trng(derive_seed(seed, "trial", static_cast<std::uint64_t>(t)));
    std::size_t p = 2 + trng.index(static_cast<std::size_t>(p_max - 1));
    std::size_t m = 1 + trng.index(static_cast<std::size_t>(m_max));
    PiecewiseLinearModel model = random_partition_model(
        p, m, derive_seed(seed, "model", static_cast<std::uint64_t>(t)));
    std::vector<double> x(p);
    for (double& v : x) v = trng.uniform(-1.0, 1.0);

    AttributionVector closed = lsv_closed_form(model, x);
    AttributionVector enumd = lsv_enumeration(model, x);
    for (std::size_t l = 0; l < p; ++l)
      rep.max_discrepancy = std::max(
          rep.max_discrepancy, std::abs(closed.scores[l] - enumd.scores[l]));

    const double expected = model.evaluate(x) - model.mean();
    double sum_closed = std::accumulate(closed.scores.begin(),
                                        closed.scores.end(), 0.0);
    double sum_enum =
        std::accumulate(enumd.scores.begin(), enumd.scores.end(), 0.0);
    rep.max_efficiency_gap = std::max(
        {rep.max_efficiency_gap, std::abs(sum_closed - expected),
         std::abs(sum_enum - expected)});
  }

  // Switch-model proportionality: phi_{x4} / x4 constant on the x6 <= 0 branch.
  PiecewiseLinearModel sw = switch_model(0.0, 2.0, 0.0, 5.0);
  Rng rng(derive_seed(seed, "switch"));
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double mean_ratio = 0.0;
  const int n_pts = 100;
  for (int i = 0; i < n_pts; ++i) {
    std::vector<double> x(6);
    for (std::size_t j = 0; j < 6; ++j) x[j] = rng.uniform(-1.0, 1.0);
    x[5] = rng.uniform(-1.0, 0.0);  // stay on the first branch
    AttributionVector phi = lsv_closed_form(sw, x);
    double ratio = phi.scores[3] / x[3];
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    mean_ratio += ratio;
    double sum = std::accumulate(phi.scores.begin(), phi.scores.end(), 0.0);
    rep.max_efficiency_gap = std::max(
        rep.max_efficiency_gap, std::abs(sum - (sw.evaluate(x) - sw.mean())));
  }
  rep.switch_ratio = mean_ratio / n_pts;
  rep.switch_ratio_spread = hi - lo;
  return rep;
}

std::vector<double> CentroidReport::target_input_a() {
  return {0, 0, 0, 0, 0, -0.5};
}
std::vector<double> CentroidReport::target_input_b() {
  return {0, 0, 0, 0, 0, 0.5};
}
std::vector<double> CentroidReport::target_importance_a() {
  return {1.0 / 3, 1.0 / 3, 0, 0, 0, 1.0 / 3};
}
std::vector<double> CentroidReport::target_importance_b() {
  return {0, 0, 1.0 / 3, 1.0 / 3, 0, 1.0 / 3};
}

CentroidReport verify_centroids(std::size_t n, std::uint64_t seed) {
  const PiecewiseLinearModel model = first_order_model();
  Rng rng(derive_seed(seed, "centroids"));
  Matrix X(n, 6);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < 6; ++j) X(i, j) = rng.uniform(-1.0, 1.0);

  const ImportanceRepresentation oracle =
      oracle_deltas(model, X, DeltaConvention::SquaredLoss);

  CentroidReport rep;
  rep.n = n;
  rep.input_a.assign(6, 0.0);
  rep.input_b.assign(6, 0.0);
  rep.importance_a.assign(6, 0.0);
  rep.importance_b.assign(6, 0.0);
  std::size_t na = 0, nb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool in_a = X(i, 5) <= 0.0;
    auto& input_c = in_a ? rep.input_a : rep.input_b;
    auto& imp_c = in_a ? rep.importance_a : rep.importance_b;
    for (std::size_t j = 0; j < 6; ++j) {
      input_c[j] += X(i, j);
      imp_c[j] += oracle.deltas(i, j);
    }
    (in_a ? na : nb) += 1;
  }
  for (std::size_t j = 0; j < 6; ++j) {
    rep.input_a[j] /= static_cast<double>(na);
    rep.input_b[j] /= static_cast<double>(nb);
    rep.importance_a[j] /= static_cast<double>(na);
    rep.importance_b[j] /= static_cast<double>(nb);
  }
  rep.separating.resize(6);
  for (std::size_t j = 0; j < 6; ++j)
    rep.separating[j] = rep.importance_a[j] - rep.importance_b[j];

  auto linf = [](const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
      d = std::max(d, std::abs(a[j] - b[j]));
    return d;
  };
  rep.linf_input_a = linf(rep.input_a, CentroidReport::target_input_a());
  rep.linf_input_b = linf(rep.input_b, CentroidReport::target_input_b());
  rep.linf_importance_a =
      linf(rep.importance_a, CentroidReport::target_importance_a());
  rep.linf_importance_b =
      linf(rep.importance_b, CentroidReport::target_importance_b());
  return rep;
}

ContaminationReport contamination_experiment(std::span<const double> rho_grid,
                                             std::size_t n, std::uint64_t seed) {
  for (double r : rho_grid)
    if (r < 0.0 || r > 0.5)
      throw std::invalid_argument("contamination_experiment: rho in [0, 0.5]");

  const PiecewiseLinearModel model = first_order_model();
  Rng rng(derive_seed(seed, "contamination"));
  Matrix X(n, 6);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < 6; ++j) X(i, j) = rng.uniform(-1.0, 1.0);
  const ImportanceRepresentation oracle =
      oracle_deltas(model, X, DeltaConvention::SquaredLoss);

  std::vector<int> rows_a, rows_b;
  for (std::size_t i = 0; i < n; ++i)
    (X(i, 5) <= 0.0 ? rows_a : rows_b).push_back(static_cast<int>(i));
  const std::size_t cluster_size = std::min(rows_a.size(), rows_b.size());

  auto cluster_mean = [&](double rho) {
    const std::size_t n_b =
        static_cast<std::size_t>(std::lround(rho * static_cast<double>(cluster_size)));
    const std::size_t n_a = cluster_size - n_b;
    std::vector<double> mean(6, 0.0);
    for (std::size_t i = 0; i < n_a; ++i)
      for (std::size_t j = 0; j < 6; ++j)
        mean[j] += oracle.deltas(static_cast<std::size_t>(rows_a[i]), j);
    for (std::size_t i = 0; i < n_b; ++i)
      for (std::size_t j = 0; j < 6; ++j)
        mean[j] += oracle.deltas(static_cast<std::size_t>(rows_b[i]), j);
    for (double& v : mean) v /= static_cast<double>(cluster_size);
    return mean;
  };

  const std::vector<double> pure = cluster_mean(0.0);
  ContaminationReport rep;
  for (double rho : rho_grid) {
    std::vector<double> mixed = cluster_mean(rho);
    double bias = 0.0;
    for (std::size_t j = 0; j < 6; ++j) {
      double d = mixed[j] - pure[j];
      bias += d * d;
    }
    rep.rho.push_back(rho);
    rep.bias.push_back(std::sqrt(bias));
  }

  // least-squares line through the origin and its fit quality
  double sxy = 0.0, sxx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < rep.rho.size(); ++i) {
    sxy += rep.rho[i] * rep.bias[i];
    sxx += rep.rho[i] * rep.rho[i];
    sy += rep.bias[i];
  }
  rep.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  const double mean_b = sy / static_cast<double>(rep.bias.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < rep.rho.size(); ++i) {
    double fit = rep.slope * rep.rho[i];
    ss_res += (rep.bias[i] - fit) * (rep.bias[i] - fit);
    ss_tot += (rep.bias[i] - mean_b) * (rep.bias[i] - mean_b);
  }
  rep.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return rep;
}

MaskingReport mask_eval(const Dataset& data, const Predictor& predictor,
                        const std::vector<std::pair<std::string, RowExplainer>>& methods,
                        std::span<const int> k_grid) {
  const std::size_t n = data.n();
  const std::size_t p = data.p();
  for (int k : k_grid)
    if (k < 0 || static_cast<std::size_t>(k) > p)
      throw std::invalid_argument("mask_eval: k out of range");

  const bool classification = data.task == TaskKind::BinaryClassification;
  auto row_error = [&](std::span<const double> x, double y) {
    if (classification) return predictor.predict_label(x) == y ? 0.0 : 1.0;
    return std::abs(predictor.predict(x) - y);
  };

  std::vector<double> column_mean(p, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) column_mean[j] += data.features(i, j);
  for (double& v : column_mean) v /= static_cast<double>(n);

  MaskingReport rep;
  rep.k_grid.assign(k_grid.begin(), k_grid.end());
  double baseline = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    baseline += row_error(data.features.row(i), data.target[i]);
  baseline /= static_cast<double>(n);
  rep.baseline_error = baseline;

  for (const auto& [name, explainer] : methods) {
    // rank once per row
    std::vector<std::vector<int>> order(n);  // descending importance
    for (std::size_t i = 0; i < n; ++i) {
      NormalizedAttribution norm = normalize(explainer(i));
      std::vector<int> idx(p);
      std::iota(idx.begin(), idx.end(), 0);
      std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        double va = norm.values[static_cast<std::size_t>(a)];
        double vb = norm.values[static_cast<std::size_t>(b)];
        if (va != vb) return va > vb;
        return a < b;
      });
      order[i] = std::move(idx);
    }

    MaskingReport::Curve curve;
    curve.name = name;
    std::vector<double> masked(p);
    for (int k : k_grid) {
      double top_zero = 0.0, bottom_zero = 0.0, top_mean = 0.0, bottom_mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        auto x = data.features.row(i);
        const double y = data.target[i];
        auto eval_masked = [&](bool top, bool mean_mask) {
          std::copy(x.begin(), x.end(), masked.begin());
          for (int t = 0; t < k; ++t) {
            int j = top ? order[i][static_cast<std::size_t>(t)]
                        : order[i][p - 1 - static_cast<std::size_t>(t)];
            masked[static_cast<std::size_t>(j)] =
                mean_mask ? column_mean[static_cast<std::size_t>(j)] : 0.0;
          }
          return row_error(masked, y);
        };
        top_zero += eval_masked(true, false);
        bottom_zero += eval_masked(false, false);
        top_mean += eval_masked(true, true);
        bottom_mean += eval_masked(false, true);
      }
      const double inv = 1.0 / static_cast<double>(n);
      curve.top_change.push_back(baseline - top_zero * inv);
      curve.bottom_change.push_back(baseline - bottom_zero * inv);
      curve.top_change_mean_mask.push_back(baseline - top_mean * inv);
      curve.bottom_change_mean_mask.push_back(baseline - bottom_mean * inv);
    }
    rep.curves.push_back(std::move(curve));
  }
  return rep;
}

std::string MaskingReport::to_tsv() const {
  std::ostringstream os;
  os << "Method\tk\tTopChange\tBottomChange\tTopChangeMeanMask\tBottomChangeMeanMask\n";
  for (const Curve& c : curves)
    for (std::size_t i = 0; i < k_grid.size(); ++i)
      os << c.name << '\t' << k_grid[i] << '\t' << format_rate(c.top_change[i])
         << '\t' << format_rate(c.bottom_change[i]) << '\t'
         << format_rate(c.top_change_mean_mask[i]) << '\t'
         << format_rate(c.bottom_change_mean_mask[i]) << '\n';
  return os.str();
}

std::string MaskingReport::to_json() const {
  nlohmann::json j;
  j["k_grid"] = k_grid;
  j["baseline_error"] = baseline_error;
  nlohmann::json jc = nlohmann::json::array();
  for (const Curve& c : curves) {
    nlohmann::json e;
    e["name"] = c.name;
    e["top_change"] = c.top_change;
    e["bottom_change"] = c.bottom_change;
    e["top_change_mean_mask"] = c.top_change_mean_mask;
    e["bottom_change_mean_mask"] = c.bottom_change_mean_mask;
    jc.push_back(std::move(e));
  }
  j["curves"] = std::move(jc);
  return j.dump(2);
}

std::string MaskingReport::to_svg() const {
  // minimal line chart: one polyline per method for the top-k change
  const double width = 640, height = 400, margin = 50;
  double lo = 0.0, hi = 0.0;
  for (const Curve& c : curves)
    for (double v : c.top_change) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (hi == lo) hi = lo + 1.0;
  const double kmax = k_grid.empty() ? 1.0 : static_cast<double>(k_grid.back());

  auto sx = [&](double k) {
    return margin + (width - 2 * margin) * (kmax > 0 ? k / kmax : 0.0);
  };
  auto sy = [&](double v) {
    return height - margin - (height - 2 * margin) * (v - lo) / (hi - lo);
  };

  static const char* colors[] = {"#1b9e77", "#d95f02", "#7570b3",
                                 "#e7298a", "#66a61e", "#e6ab02"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\""
     << width - margin << "\" y2=\"" << height - margin
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin
     << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"" << height - 10
     << "\" text-anchor=\"middle\" font-size=\"12\">top-k masked (change in error)"
     << "</text>\n";
  std::size_t ci = 0;
  for (const Curve& c : curves) {
    const char* color = colors[ci % 6];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (std::size_t i = 0; i < k_grid.size(); ++i)
      os << sx(static_cast<double>(k_grid[i])) << ',' << sy(c.top_change[i]) << ' ';
    os << "\"/>\n";
    os << "<text x=\"" << width - margin + 4 << "\" y=\"" << margin + 14 * ci
       << "\" font-size=\"11\" fill=\"" << color << "\">" << c.name << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace rloco
