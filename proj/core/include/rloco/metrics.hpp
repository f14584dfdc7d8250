#pragma once

#include <span>
#include <vector>

#include "rloco/attribution.hpp"

namespace rloco {

struct RankingMetrics {
  double tp_rate = 0.0;
  double fp_rate = 0.0;
  double ni_mean = 0.0;
  double ni_q10 = 0.0;
  double ni_q95 = 0.0;
};

// How the top-k features of an attribution are selected.
//   Magnitude: rank by the normalized magnitudes |s_j| / sum|s|.
//   Signed:    rank by the raw signed scores (argsort descending). This is
//              the convention the reference results were produced with; sign-
//              agnostic methods (nonnegative scores) behave identically under
//              both.
enum class RankingConvention { Magnitude, Signed };

// Linear-interpolation quantile on the order statistics (type-7 estimator).
double quantile(std::vector<double> values, double q);

// Top-k detection metrics against per-observation ground-truth sets.
// Excluded features are removed from the candidate ranking (but still take
// part in the magnitude normalization). k must equal |truth| for every row.
// NI statistics pool normalized magnitudes of features outside truth+excluded
// across all observations. Ties break toward the lowest feature index.
RankingMetrics ranking_metrics(
    std::span<const AttributionVector> attributions,
    const std::vector<std::vector<int>>& truth_sets, int k,
    const std::vector<int>& excluded,
    RankingConvention convention = RankingConvention::Magnitude);

}  // namespace rloco
