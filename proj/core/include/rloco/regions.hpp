#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rloco/attribution.hpp"
#include "rloco/loco.hpp"
#include "rloco/matrix.hpp"

namespace rloco {

enum class ClusterAlgorithm { KMeans, AffinityPropagation, VarianceTree, OracleRegions };
enum class ClusterSpace { Importance, Input, EnrichedImportance };
enum class DistanceMetric { Euclidean, Manhattan };
enum class AssignmentRule { SumOfDistances, NearestCentroid };

std::string to_string(ClusterAlgorithm a);
std::string to_string(ClusterSpace s);

struct ClusterSpec {
  ClusterAlgorithm algorithm = ClusterAlgorithm::AffinityPropagation;
  ClusterSpace space = ClusterSpace::Importance;
  int k = 2;                   // kmeans
  double damping = 0.8;        // affinity propagation, in [0.5, 1)
  int max_leaves = 8;          // variance tree
  int min_leaf = 50;           // variance tree
  std::uint64_t seed = 0;
  DistanceMetric metric = DistanceMetric::Euclidean;
  AssignmentRule assignment = AssignmentRule::SumOfDistances;
  std::vector<int> oracle_labels;  // OracleRegions input
};

struct RegionPartition {
  std::vector<int> assignments;            // calibration-row labels in [0, K)
  std::vector<std::vector<int>> members;   // per-cluster row indices
  Matrix regional_attributions;            // K x p column means of the deltas
  Matrix clustering_space;                 // snapshot used for assignment
  std::vector<std::vector<double>> centroids;  // per-cluster mean in that space
  DistanceMetric metric = DistanceMetric::Euclidean;
  AssignmentRule assignment = AssignmentRule::SumOfDistances;
  ClusterAlgorithm algorithm = ClusterAlgorithm::KMeans;
  bool ap_fallback = false;  // affinity propagation fell back to kmeans
  std::vector<std::string> warnings;
  std::string tree_rules;  // text rendering of the variance-tree splits

  std::size_t k() const { return members.size(); }
  std::string to_json(const std::vector<std::string>& feature_names) const;
};

// Clusters the rows of repr (already in the requested space); the regional
// attribution matrix is left empty until regional_attributions() fills it.
RegionPartition cluster(const Matrix& repr, const ClusterSpec& spec);

// Row representation the pipeline clusters in. Raw deltas are dominated by
// the heavy-tailed switch-feature column (k-means then splits on delta
// magnitude, not regime), so the importance space uses the per-observation
// normalized magnitude pattern |d| / sum|d| (uniform for all-zero rows). The
// enriched space appends the signed residuals and divides the whole row by
// its total absolute sum, which keeps the regime sign information bounded.
Matrix clustering_rows(const ImportanceRepresentation& repr, const Matrix& inputs,
                       ClusterSpace space);
std::vector<double> clustering_row(std::span<const double> deltas,
                                   std::span<const double> signed_residuals,
                                   std::span<const double> input,
                                   ClusterSpace space);

// Per-cluster column means of the deltas (never of the signed channel).
// Empty clusters are dropped with renumbering and flagged in warnings.
void fill_regional_attributions(RegionPartition& partition,
                                const ImportanceRepresentation& repr);

struct Assignment {
  int label = -1;
  bool undecidable = false;
  std::vector<int> tied;
};

// Region of a query point: the cluster minimizing the summed distance over
// its members (or the nearest centroid in fast mode). An exact tie yields the
// undecidable sentinel with the tied clusters listed.
Assignment assign(const RegionPartition& partition, std::span<const double> x_repr);

// End-to-end regional attribution pipeline.
struct RlocoPipeline {
  LocoModels models;
  ConformityScore score;
  ClusterSpec cluster_spec;
  ImportanceRepresentation calibration_repr;
  RegionPartition partition;
};

RlocoPipeline fit_rloco(const Dataset& fit_data, const Dataset& calibration_data,
                        const LearnerSpec& learner, const ClusterSpec& cspec,
                        int threads = 1);

struct RlocoExplanation {
  AttributionVector attribution;
  int cluster = -1;
  bool undecidable = false;  // resolved to the lowest tied index
  TargetMode mode = TargetMode::Benchmark;
};

// Computes the point's importance representation from the fitted models (the
// true target when given, f0(x) otherwise), assigns it to a region, and
// returns that region's attribution vector.
RlocoExplanation explain_rloco(const RlocoPipeline& pipeline,
                               std::span<const double> x, std::optional<double> y);

}  // namespace rloco
