#pragma once

#include <string>
#include <vector>

namespace rloco {

// Per-feature signed scores from one attribution method.
struct AttributionVector {
  std::vector<double> scores;
  std::string method;
};

struct NormalizedAttribution {
  std::vector<double> values;  // |scores| / sum|scores|, sums to 1
  bool degenerate = false;     // all-zero input normalized to uniform
};

// Magnitude normalization used for scoring: |s_j| / sum_i |s_i|. An all-zero
// vector maps to the uniform 1/p vector with the degenerate flag set, so
// benchmark sweeps never abort mid-run.
NormalizedAttribution normalize(const AttributionVector& attr);

}  // namespace rloco
