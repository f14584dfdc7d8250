#include "rloco/conformity.hpp"

#include <cmath>
#include <stdexcept>

namespace rloco {

double conformity(const ConformityScore& score, double prediction, double y) {
  if (!std::isfinite(prediction) || !std::isfinite(y))
    throw std::invalid_argument("conformity: non-finite input");
  switch (score.kind) {
    case ConformityKind::RSquared: {
      if (!(score.sigma2 > 0.0))
        throw std::invalid_argument("conformity: sigma2 must be > 0");
      double r = y - prediction;
      return 1.0 - r * r / score.sigma2;
    }
    case ConformityKind::Accuracy:
      return prediction == y ? 1.0 : 0.0;
  }
  throw std::logic_error("conformity: unknown kind");
}

}  // namespace rloco
