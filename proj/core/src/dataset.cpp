#include "rloco/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rloco/rng.hpp"

namespace rloco {

Dataset::Dataset(Matrix f, std::vector<double> t, std::vector<std::string> names,
                 TaskKind task_kind)
    : features(std::move(f)),
      target(std::move(t)),
      feature_names(std::move(names)),
      task(task_kind) {
  if (features.rows() < 1 || features.cols() < 1)
    throw std::invalid_argument("Dataset: need n >= 1 and p >= 1");
  if (target.size() != features.rows())
    throw std::invalid_argument("Dataset: target length must equal row count");
  if (feature_names.size() != features.cols())
    throw std::invalid_argument("Dataset: feature_names length must equal p");
  for (std::size_t i = 0; i < features.rows(); ++i)
    for (double v : features.row(i))
      if (!std::isfinite(v))
        throw std::invalid_argument("Dataset: non-finite feature value");
  for (double v : target)
    if (!std::isfinite(v))
      throw std::invalid_argument("Dataset: non-finite target value");
}

Dataset Dataset::subset(std::span<const int> rows) const {
  std::vector<double> t(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    t[i] = target[static_cast<std::size_t>(rows[i])];
  return Dataset(features.select_rows(rows), std::move(t), feature_names, task);
}

Dataset Dataset::drop_feature(std::size_t j) const {
  std::vector<std::string> names;
  names.reserve(feature_names.size() - 1);
  for (std::size_t k = 0; k < feature_names.size(); ++k)
    if (k != j) names.push_back(feature_names[k]);
  return Dataset(features.drop_column(j), target, std::move(names), task);
}

SplitIndices make_benchmark_split(std::size_t n, std::uint64_t seed) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(derive_seed(seed, "split"));
  for (std::size_t i = n; i > 1; --i)
    std::swap(perm[i - 1], perm[rng.index(i)]);

  const std::size_t n_train = (n * 3) / 4;
  const std::size_t n_fit = n_train / 2;

  SplitIndices s;
  s.fit.assign(perm.begin(), perm.begin() + static_cast<long>(n_fit));
  s.calibration.assign(perm.begin() + static_cast<long>(n_fit),
                       perm.begin() + static_cast<long>(n_train));
  s.test.assign(perm.begin() + static_cast<long>(n_train), perm.end());
  return s;
}

double population_variance(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("population_variance: empty");
  double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                static_cast<double>(values.size());
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return acc / static_cast<double>(values.size());
}

}  // namespace rloco
