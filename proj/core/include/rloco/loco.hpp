#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rloco/attribution.hpp"
#include "rloco/conformity.hpp"
#include "rloco/dataset.hpp"
#include "rloco/learners.hpp"
#include "rloco/pwl.hpp"

namespace rloco {

// The full model and the p leave-one-covariate-out refits, all trained on the
// same fit split. sigma2_fit is the population target variance of that split,
// used as the R-squared conformity denominator.
struct LocoModels {
  Predictor full;
  std::vector<Predictor> dropped;  // dropped[j] fitted without column j
  LearnerSpec spec;
  double sigma2_fit = 1.0;
  TaskKind task = TaskKind::Regression;

  std::size_t p() const { return dropped.size(); }
  double predict_full(std::span<const double> x) const;
  double predict_dropped(std::size_t j, std::span<const double> x) const;
};

LocoModels fit_loco(const Dataset& fit_data, const LearnerSpec& spec,
                    int threads = 1);

// Per-observation importance representation: deltas[i][j] = V(f0(x_i), y_i) -
// V(f_-j(x_i), y_i). The optional signed channel stores the raw prediction
// residuals f0(x_i) - f_-j(x_i). The enriched clustering view is the column
// concatenation [deltas | signed].
struct ImportanceRepresentation {
  Matrix deltas;
  std::optional<Matrix> signed_residuals;

  bool enriched() const { return signed_residuals.has_value(); }
  Matrix concatenated() const;  // [deltas | signed] when enriched
  std::string to_tsv(const std::vector<std::string>& feature_names) const;
};

ImportanceRepresentation delta_scores(const LocoModels& models,
                                      const Dataset& eval_data,
                                      const ConformityScore& score,
                                      bool enriched = false);

// Deltas of a single point. Benchmark mode uses the supplied target;
// deployment mode (no target) substitutes f0(x) for Y.
enum class TargetMode { Benchmark, Deployment };

struct PointImportance {
  std::vector<double> deltas;
  std::vector<double> signed_residuals;
  TargetMode mode = TargetMode::Benchmark;
};

PointImportance point_importance(const LocoModels& models,
                                 std::span<const double> x,
                                 std::optional<double> y,
                                 const ConformityScore& score);

// Column means of the deltas: the plug-in global importance estimate.
AttributionVector global_psi(const ImportanceRepresentation& repr);

enum class DeltaConvention { SquaredLoss, RSquaredNormalized };

// Analytic deltas (f(x) - f_-j(x))^2 with exact conditional means for a
// piecewise-linear model under independent U[-1,1] marginals. The normalized
// convention divides by the population variance of f over the given rows.
ImportanceRepresentation oracle_deltas(const PiecewiseLinearModel& model,
                                       const Matrix& x_rows,
                                       DeltaConvention convention,
                                       bool enriched = false);

// Monte-Carlo variant for arbitrary evaluators; coordinate j is resampled
// from the empirical marginal of the given rows.
ImportanceRepresentation oracle_deltas_mc(const Evaluator& f, const Matrix& x_rows,
                                          DeltaConvention convention, bool enriched,
                                          std::size_t mc_budget, std::uint64_t seed);

}  // namespace rloco
