#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rloco/dataset.hpp"
#include "rloco/pwl.hpp"

namespace rloco {

enum class ModelId { FirstOrder, SecondOrder, SecondOrderInteraction };

std::string to_string(ModelId id);
ModelId model_id_from_string(const std::string& s);
std::size_t model_dim(ModelId id);      // 6, 10, 10
int model_metric_k(ModelId id);         // 2, 3, 4 (2 per active pair)

struct SyntheticSpec {
  ModelId model = ModelId::FirstOrder;
  std::size_t p = 6;
  std::size_t n = 4000;
  std::uint64_t seed = 1;
};

// Per-observation truth used for scoring: the locally active feature set, the
// switch features excluded from ranking, and the magnitude of each active
// additive component evaluated at the observation.
struct GroundTruth {
  std::vector<std::vector<int>> active_sets;  // n rows, each of size metric_k
  std::vector<int> excluded;                  // switch features (0-based)
  Matrix true_importance;                     // n x p
  std::string importance_convention;
  std::vector<int> regime;                    // n, coarse regime label
};

struct SyntheticData {
  Dataset data;
  Evaluator evaluator;
  std::optional<PiecewiseLinearModel> pwl;  // exact model when representable
  GroundTruth truth;
  int metric_k = 2;
  ModelId model = ModelId::FirstOrder;
};

// Noiseless draws: X ~ U[-1,1]^p i.i.d., Y = f(X).
SyntheticData generate(const SyntheticSpec& spec);

// Two-branch selector model on p = 6 features:
//   f(x) = (a1 x1 + a2 x2) 1{x6 <= 0} + (a3 x3 + a4 x4) 1{x6 > 0}.
// Encoded so that x6 = 0 falls in the first branch under the half-open
// region convention.
PiecewiseLinearModel switch_model(double a1, double a2, double a3, double a4);

// switch_model(1, 1, 1, 1): the first synthetic generator.
PiecewiseLinearModel first_order_model();

// f(x1, x2) = x2 * sgn(x1) on p = 2, as an exact two-region model
// (x1 < 0 -> -x2, x1 >= 0 -> +x2).
PiecewiseLinearModel sign_switch_model();

}  // namespace rloco
