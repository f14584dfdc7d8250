#include "rloco/attribution.hpp"

#include <cmath>
#include <stdexcept>

namespace rloco {

NormalizedAttribution normalize(const AttributionVector& attr) {
  if (attr.scores.empty())
    throw std::invalid_argument("normalize: empty attribution vector");
  double total = 0.0;
  for (double s : attr.scores) {
    if (!std::isfinite(s))
      throw std::invalid_argument("normalize: non-finite score");
    total += std::abs(s);
  }
  NormalizedAttribution out;
  out.values.resize(attr.scores.size());
  if (total == 0.0) {
    out.degenerate = true;
    double u = 1.0 / static_cast<double>(attr.scores.size());
    for (double& v : out.values) v = u;
    return out;
  }
  for (std::size_t j = 0; j < attr.scores.size(); ++j)
    out.values[j] = std::abs(attr.scores[j]) / total;
  return out;
}

}  // namespace rloco
