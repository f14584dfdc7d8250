#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rloco/dataset.hpp"
#include "rloco/learners.hpp"
#include "rloco/lime.hpp"
#include "rloco/metrics.hpp"
#include "rloco/regions.hpp"
#include "rloco/shapley.hpp"
#include "rloco/synthetic.hpp"

namespace rloco {

// One attribution method entry of a benchmark run.
struct MethodSpec {
  enum class Kind { Lsv, Lime, Loco, Rloco };
  Kind kind = Kind::Rloco;
  std::string name = "R-LOCO";
  ClusterSpec cluster;       // rloco variants
  bool oracle_assign = false;  // true-cluster control: test rows assigned by regime
};

MethodSpec method_lsv();
MethodSpec method_lime();
MethodSpec method_loco();
MethodSpec method_rloco_affinity(double damping = 0.8);
MethodSpec method_rloco_tc();
MethodSpec method_rloco_tree();
MethodSpec method_rloco_ic();
MethodSpec method_rloco_kmeans(int k);
// Parses names like "rloco", "rloco-kmeans-8", "rloco-affinity-0.6", "lsv".
MethodSpec parse_method(const std::string& name);

struct BenchmarkConfig {
  ModelId model = ModelId::FirstOrder;
  std::vector<MethodSpec> methods;
  int runs = 50;
  std::size_t n = 4000;
  std::uint64_t seed = 1;
  LearnerSpec learner;  // default random forest
  std::size_t lime_samples = 2000;
  bool lime_discretize = true;  // reference-implementation tabular behavior
  std::size_t lsv_background = 128;
  RankingConvention ranking = RankingConvention::Signed;
  int threads = 0;  // 0 = hardware concurrency
};

struct MethodAggregate {
  std::string name;
  RankingMetrics mean;  // across successful runs
  std::vector<RankingMetrics> per_run;
  int failed_runs = 0;
  std::vector<std::string> failure_messages;
};

struct BenchmarkReport {
  std::string model;
  int runs = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string ranking;
  std::vector<MethodAggregate> methods;

  std::string to_tsv() const;   // Method, TP, FP, NI mean, NI q0.1, NI q0.95
  std::string to_json() const;  // full per-run detail
};

BenchmarkReport run_synthetic_benchmark(const BenchmarkConfig& cfg);

// Randomized equivalence check of the closed form against subset enumeration,
// plus the switch-model proportionality probe.
struct Theorem1Report {
  int trials = 0;
  double max_discrepancy = 0.0;      // closed form vs enumeration
  double max_efficiency_gap = 0.0;   // |sum(phi) - (f(x) - E f)|
  double switch_ratio = 0.0;         // phi_{x4} / x4 on the x6 <= 0 branch
  double switch_ratio_spread = 0.0;  // max - min of that ratio over 100 points
};

Theorem1Report verify_theorem1(int trials, int p_max, int m_max,
                               std::uint64_t seed);

struct CentroidReport {
  std::size_t n = 0;
  std::vector<double> input_a, input_b;            // empirical input-space centroids
  std::vector<double> importance_a, importance_b;  // importance-space centroids
  std::vector<double> separating;                  // importance_a - importance_b
  double linf_input_a = 0.0, linf_input_b = 0.0;
  double linf_importance_a = 0.0, linf_importance_b = 0.0;
  static std::vector<double> target_input_a();
  static std::vector<double> target_input_b();
  static std::vector<double> target_importance_a();
  static std::vector<double> target_importance_b();
};

CentroidReport verify_centroids(std::size_t n, std::uint64_t seed);

// Mixes a rho fraction of the other regime's rows into the regime-A cluster
// (fixed cluster size) and measures the attribution shift against the pure
// cluster; the shift should be linear in rho.
struct ContaminationReport {
  std::vector<double> rho;
  std::vector<double> bias;  // L2 norm of the regional-attribution shift
  double slope = 0.0;        // least-squares line through the origin
  double r2 = 0.0;
};

ContaminationReport contamination_experiment(std::span<const double> rho_grid,
                                             std::size_t n, std::uint64_t seed);

// Appendix-style zero-masking fidelity evaluation.
using RowExplainer = std::function<AttributionVector(std::size_t row)>;

struct MaskingReport {
  std::vector<int> k_grid;
  double baseline_error = 0.0;
  struct Curve {
    std::string name;
    std::vector<double> top_change;     // AvgError_original - AvgError_top-k
    std::vector<double> bottom_change;
    // secondary mean-masking columns, never mixed into the headline numbers
    std::vector<double> top_change_mean_mask;
    std::vector<double> bottom_change_mean_mask;
  };
  std::vector<Curve> curves;

  std::string to_tsv() const;
  std::string to_json() const;
  std::string to_svg() const;
};

MaskingReport mask_eval(const Dataset& data, const Predictor& predictor,
                        const std::vector<std::pair<std::string, RowExplainer>>& methods,
                        std::span<const int> k_grid);

}  // namespace rloco
