#pragma once

#include <cstdint>
#include <span>

#include "rloco/attribution.hpp"
#include "rloco/matrix.hpp"
#include "rloco/pwl.hpp"

namespace rloco {

enum class ShapleyMode { ClosedForm, Enumeration, MonteCarlo };

struct ShapleyConfig {
  ShapleyMode mode = ShapleyMode::MonteCarlo;
  std::size_t mc_samples_per_subset = 128;
  std::uint64_t seed = 0;
};

// Exact local Shapley values of a piecewise-linear model under independent
// U[-1,1] marginals. The subset-weighted sums are evaluated with the
// size-stratified elementary-symmetric-polynomial recurrence (the subset
// weight depends only on |S|), so no explicit subset enumeration happens.
AttributionVector lsv_closed_form(const PiecewiseLinearModel& model,
                                  std::span<const double> x);

// Reference implementation by explicit enumeration over all subsets, using
// the analytic value functions. Requires p <= 20.
AttributionVector lsv_enumeration(const PiecewiseLinearModel& model,
                                  std::span<const double> x);

// Marginal-expectation Shapley values for an arbitrary evaluator, with
// v(S) estimated by splicing x_S into background rows. Subsets are
// enumerated exactly for p <= 12; above that, uniform random permutation
// sampling with cfg.mc_samples_per_subset permutations.
AttributionVector lsv_monte_carlo(const Evaluator& f, const Matrix& background,
                                  std::span<const double> x,
                                  const ShapleyConfig& cfg);

}  // namespace rloco
