#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>

#include "rloco/dataset.hpp"

namespace rloco {

enum class LearnerKind { RegressionTree, RandomForest, KNearest, LinearLeastSquares };

std::string to_string(LearnerKind kind);
LearnerKind learner_kind_from_string(const std::string& s);

struct LearnerSpec {
  LearnerKind kind = LearnerKind::RandomForest;
  int max_depth = -1;         // -1 = unlimited
  int min_leaf = 5;
  int n_trees = 100;          // forest only
  int feature_subsample = 0;  // per-split mtry; 0 = all features
  int k = 5;                  // k-nearest only
  std::uint64_t seed = 0;
};

// Immutable fitted model with value semantics (cheap shared-state copies).
// Prediction is thread-safe.
class Predictor {
 public:
  Predictor() = default;

  double predict(std::span<const double> x) const;
  // For classification tasks, the 0/1 label (mean response thresholded at 0.5);
  // identical to predict() for regression.
  double predict_label(std::span<const double> x) const;

  std::size_t input_dim() const;
  TaskKind task() const;
  LearnerKind kind() const;

  std::string to_json() const;
  static Predictor from_json(const std::string& text);

  struct Impl;
  explicit Predictor(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  const Impl& impl() const { return *impl_; }

 private:
  std::shared_ptr<const Impl> impl_;
};

Predictor fit(const LearnerSpec& spec, const Dataset& data);

}  // namespace rloco
