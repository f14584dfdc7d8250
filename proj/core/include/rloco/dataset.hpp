#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rloco/matrix.hpp"

namespace rloco {

enum class TaskKind { Regression, BinaryClassification };

// Immutable after construction; the constructor validates the invariants
// (n >= 1, p >= 1, finite values, aligned target) and throws on violation.
struct Dataset {
  Matrix features;                         // n x p
  std::vector<double> target;              // length n
  std::vector<std::string> feature_names;  // length p
  TaskKind task = TaskKind::Regression;

  Dataset() = default;
  Dataset(Matrix features, std::vector<double> target,
          std::vector<std::string> names, TaskKind task);

  std::size_t n() const { return features.rows(); }
  std::size_t p() const { return features.cols(); }

  Dataset subset(std::span<const int> rows) const;
  Dataset drop_feature(std::size_t j) const;
};

// Row indices for the evaluation protocol: 75/25 outer train/test split, the
// training part split evenly into fit and calibration halves.
struct SplitIndices {
  std::vector<int> fit;
  std::vector<int> calibration;
  std::vector<int> test;
};

SplitIndices make_benchmark_split(std::size_t n, std::uint64_t seed);

// Population (1/n) variance; the convention used for the R-squared conformity
// score denominator.
double population_variance(std::span<const double> values);

}  // namespace rloco
