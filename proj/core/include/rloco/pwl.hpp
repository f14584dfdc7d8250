#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rloco/matrix.hpp"

namespace rloco {

using Evaluator = std::function<double(std::span<const double>)>;

// Per-dimension interval of a hyperrectangle region. Membership is half-open:
// lo <= x < hi, with +-infinity meaning unbounded. A shared boundary between
// two regions therefore belongs to exactly one of them.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return lo <= x && x < hi; }
};

// f(x) = sum_k (a_k . x + b_k) 1{x in A_k} over disjoint hyperrectangles A_k.
// The analytic quantities (region probabilities, value functions, conditional
// means) assume independent U[-1,1] marginals on every coordinate.
struct PiecewiseLinearModel {
  std::vector<std::vector<Interval>> regions;  // m x p
  Matrix coefficients;                         // m x p
  std::vector<double> intercepts;              // m

  std::size_t num_regions() const { return regions.size(); }
  std::size_t dim() const { return coefficients.cols(); }

  // Index of the region containing x, or -1 when none matches.
  int region_index(std::span<const double> x) const;
  double evaluate(std::span<const double> x) const;

  // P(X_i in [lo,hi]) and E[X_i 1{X_i in [lo,hi]}] for X_i ~ U[-1,1]; the
  // interval is clipped to the support first.
  static double interval_prob(const Interval& iv);
  static double interval_first_moment(const Interval& iv);

  // E[f(X)] under independent U[-1,1] marginals.
  double mean() const;

  // v_k(S) = E[f_k(X) 1{X in A_k} | X_S = x_S]; subset_mask has bit i set when
  // feature i is conditioned on. A region with any zero-probability dimension
  // contributes 0 for every S.
  double value_function_mask(std::span<const double> x, std::uint32_t subset_mask,
                             std::size_t k) const;

  // Closed-form f_{-j}(x) = E[f(X) | X_{-j} = x_{-j}].
  double conditional_mean_drop(std::span<const double> x, std::size_t j) const;

  std::string to_json() const;
  static PiecewiseLinearModel from_json(const std::string& text);

  Evaluator as_evaluator() const;
};

// Subset-list convenience wrapper over value_function_mask.
double analytic_value_function(const PiecewiseLinearModel& model,
                               std::span<const double> x,
                               std::span<const int> subset, std::size_t k);

// Monte-Carlo f_{-j}(x) for an arbitrary evaluator: coordinate j is resampled
// mc_budget times from the given pool column (empirical marginal). A pool with
// zero rows means U[-1,1] resampling.
double conditional_mean_drop_mc(const Evaluator& f, std::span<const double> x,
                                std::size_t j, std::size_t mc_budget,
                                std::uint64_t seed, const Matrix* pool = nullptr);

// Random axis-aligned partition of [-1,1]^p into m hyperrectangles (recursive
// splits), with uniform coefficients in [-2,2]. zero_dims forces the listed
// features to have zero coefficients in every region (and no bounds), making
// them globally irrelevant.
PiecewiseLinearModel random_partition_model(std::size_t p, std::size_t m,
                                            std::uint64_t seed,
                                            std::span<const int> zero_dims = {});

}  // namespace rloco
