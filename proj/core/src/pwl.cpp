#include "rloco/pwl.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include <json.hpp>

#include "rloco/rng.hpp"

namespace rloco {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

int PiecewiseLinearModel::region_index(std::span<const double> x) const {
  for (std::size_t k = 0; k < regions.size(); ++k) {
    bool inside = true;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!regions[k][i].contains(x[i])) {
        inside = false;
        break;
      }
    }
    if (inside) return static_cast<int>(k);
  }
  return -1;
}

double PiecewiseLinearModel::evaluate(std::span<const double> x) const {
  if (x.size() != dim())
    throw std::invalid_argument("PiecewiseLinearModel::evaluate: dimension mismatch");
  int k = region_index(x);
  if (k < 0)
    throw std::invalid_argument("PiecewiseLinearModel::evaluate: x outside every region");
  double acc = intercepts[static_cast<std::size_t>(k)];
  for (std::size_t i = 0; i < x.size(); ++i)
    acc += coefficients(static_cast<std::size_t>(k), i) * x[i];
  return acc;
}

double PiecewiseLinearModel::interval_prob(const Interval& iv) {
  double a = std::max(iv.lo, -1.0);
  double b = std::min(iv.hi, 1.0);
  return b > a ? (b - a) / 2.0 : 0.0;
}

double PiecewiseLinearModel::interval_first_moment(const Interval& iv) {
  double a = std::max(iv.lo, -1.0);
  double b = std::min(iv.hi, 1.0);
  return b > a ? (b * b - a * a) / 4.0 : 0.0;
}

double PiecewiseLinearModel::value_function_mask(std::span<const double> x,
                                                 std::uint32_t subset_mask,
                                                 std::size_t k) const {
  const std::size_t p = dim();
  const auto& cell = regions[k];

  // A region with any zero-probability dimension has measure zero and
  // contributes nothing, whichever features are conditioned on.
  for (std::size_t i = 0; i < p; ++i)
    if (interval_prob(cell[i]) == 0.0) return 0.0;

  double prod_p_out = 1.0;
  double sum_in = 0.0;
  double sum_out = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    const Interval& iv = cell[i];
    if (subset_mask & (1u << i)) {
      if (!iv.contains(x[i])) return 0.0;
      sum_in += coefficients(k, i) * x[i];
    } else {
      double pi = interval_prob(iv);
      prod_p_out *= pi;
      sum_out += coefficients(k, i) * interval_first_moment(iv) / pi;
    }
  }
  return prod_p_out * (sum_in + sum_out + intercepts[k]);
}

double PiecewiseLinearModel::mean() const {
  std::vector<double> dummy(dim(), 0.0);
  double acc = 0.0;
  for (std::size_t k = 0; k < num_regions(); ++k)
    acc += value_function_mask(dummy, 0u, k);
  return acc;
}

double PiecewiseLinearModel::conditional_mean_drop(std::span<const double> x,
                                                   std::size_t j) const {
  if (j >= dim())
    throw std::invalid_argument("conditional_mean_drop: feature index out of range");
  double acc = 0.0;
  for (std::size_t k = 0; k < num_regions(); ++k) {
    const auto& cell = regions[k];
    double ind = 1.0;
    for (std::size_t i = 0; i < dim(); ++i) {
      if (i == j) continue;
      if (!cell[i].contains(x[i])) {
        ind = 0.0;
        break;
      }
    }
    if (ind == 0.0) continue;
    double base = intercepts[k];
    for (std::size_t i = 0; i < dim(); ++i) {
      if (i == j) continue;
      base += coefficients(k, i) * x[i];
    }
    acc += base * interval_prob(cell[j]) +
           coefficients(k, j) * interval_first_moment(cell[j]);
  }
  return acc;
}

double analytic_value_function(const PiecewiseLinearModel& model,
                               std::span<const double> x,
                               std::span<const int> subset, std::size_t k) {
  if (model.dim() > 32)
    throw std::invalid_argument("analytic_value_function: p > 32 unsupported");
  std::uint32_t mask = 0;
  for (int i : subset) {
    if (i < 0 || static_cast<std::size_t>(i) >= model.dim())
      throw std::invalid_argument("analytic_value_function: bad subset index");
    mask |= 1u << i;
  }
  return model.value_function_mask(x, mask, k);
}

double conditional_mean_drop_mc(const Evaluator& f, std::span<const double> x,
                                std::size_t j, std::size_t mc_budget,
                                std::uint64_t seed, const Matrix* pool) {
  if (mc_budget == 0)
    throw std::invalid_argument("conditional_mean_drop_mc: mc_budget must be > 0");
  Rng rng(seed);
  std::vector<double> z(x.begin(), x.end());
  double acc = 0.0;
  for (std::size_t b = 0; b < mc_budget; ++b) {
    if (pool != nullptr && pool->rows() > 0)
      z[j] = (*pool)(rng.index(pool->rows()), j);
    else
      z[j] = rng.uniform(-1.0, 1.0);
    acc += f(z);
  }
  return acc / static_cast<double>(mc_budget);
}

Evaluator PiecewiseLinearModel::as_evaluator() const {
  auto self = std::make_shared<PiecewiseLinearModel>(*this);
  return [self](std::span<const double> x) { return self->evaluate(x); };
}

std::string PiecewiseLinearModel::to_json() const {
  nlohmann::json j;
  j["regions"] = nlohmann::json::array();
  for (const auto& cell : regions) {
    nlohmann::json jr = nlohmann::json::array();
    for (const Interval& iv : cell) {
      nlohmann::json pair = nlohmann::json::array();
      pair.push_back(std::isinf(iv.lo) ? nlohmann::json(nullptr)
                                       : nlohmann::json(iv.lo));
      pair.push_back(std::isinf(iv.hi) ? nlohmann::json(nullptr)
                                       : nlohmann::json(iv.hi));
      jr.push_back(pair);
    }
    j["regions"].push_back(jr);
  }
  j["coefficients"] = nlohmann::json::array();
  for (std::size_t k = 0; k < coefficients.rows(); ++k) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t i = 0; i < coefficients.cols(); ++i)
      row.push_back(coefficients(k, i));
    j["coefficients"].push_back(row);
  }
  j["intercepts"] = intercepts;
  return j.dump();
}

PiecewiseLinearModel PiecewiseLinearModel::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  PiecewiseLinearModel m;
  const auto& jr = j.at("regions");
  const auto& jc = j.at("coefficients");
  if (jr.empty() || jc.size() != jr.size())
    throw std::invalid_argument("PiecewiseLinearModel::from_json: bad shape");
  const std::size_t p = jr[0].size();
  m.coefficients = Matrix(jc.size(), p);
  for (std::size_t k = 0; k < jr.size(); ++k) {
    std::vector<Interval> cell(p);
    for (std::size_t i = 0; i < p; ++i) {
      const auto& pair = jr[k][i];
      cell[i].lo = pair[0].is_null() ? -kInf : pair[0].get<double>();
      cell[i].hi = pair[1].is_null() ? kInf : pair[1].get<double>();
    }
    m.regions.push_back(std::move(cell));
    for (std::size_t i = 0; i < p; ++i)
      m.coefficients(k, i) = jc[k][i].get<double>();
  }
  m.intercepts = j.at("intercepts").get<std::vector<double>>();
  if (m.intercepts.size() != m.regions.size())
    throw std::invalid_argument("PiecewiseLinearModel::from_json: bad intercepts");
  return m;
}

PiecewiseLinearModel random_partition_model(std::size_t p, std::size_t m,
                                            std::uint64_t seed,
                                            std::span<const int> zero_dims) {
  if (p == 0 || p > 32)
    throw std::invalid_argument("random_partition_model: p in [1,32]");
  if (m == 0) throw std::invalid_argument("random_partition_model: m >= 1");
  std::vector<bool> zero(p, false);
  for (int d : zero_dims) zero[static_cast<std::size_t>(d)] = true;
  std::vector<std::size_t> splittable;
  for (std::size_t i = 0; i < p; ++i)
    if (!zero[i]) splittable.push_back(i);
  if (m > 1 && splittable.empty())
    throw std::invalid_argument("random_partition_model: no splittable dimension");

  Rng rng(seed);
  std::vector<std::vector<Interval>> boxes;
  boxes.emplace_back(p);  // all (-inf, inf)
  while (boxes.size() < m) {
    std::size_t b = rng.index(boxes.size());
    std::size_t d = splittable[rng.index(splittable.size())];
    const Interval iv = boxes[b][d];
    double a = std::max(iv.lo, -1.0);
    double c = std::min(iv.hi, 1.0);
    // keep a safety margin so no region gets vanishing probability
    double t = rng.uniform(a + 0.15 * (c - a), c - 0.15 * (c - a));
    std::vector<Interval> right = boxes[b];
    boxes[b][d].hi = t;
    right[d].lo = t;
    boxes.push_back(std::move(right));
  }

  PiecewiseLinearModel model;
  model.regions = std::move(boxes);
  model.coefficients = Matrix(m, p);
  model.intercepts.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < p; ++i)
      model.coefficients(k, i) = zero[i] ? 0.0 : rng.uniform(-2.0, 2.0);
    model.intercepts[k] = rng.uniform(-1.0, 1.0);
  }
  return model;
}

}  // namespace rloco
