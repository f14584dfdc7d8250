#include "rloco/synthetic.hpp"

#include <cmath>
#include <stdexcept>

#include "rloco/rng.hpp"

namespace rloco {

namespace {

const double kRoot3 = std::sqrt(3.0);

double second_order_eval(std::span<const double> x) {
  double a = x[0] + x[1] * x[1] + std::sqrt(std::abs(x[2]));
  double b = x[3] + x[4] * x[4] + std::sqrt(std::abs(x[5]));
  return x[9] <= 0.0 ? a : b;
}

double interaction_eval(std::span<const double> x) {
  double out = 0.0;
  if (x[2] > 0.0)
    out += 3.0 * kRoot3 * x[0] * x[1];
  else
    out += kRoot3 * x[3] * x[4];
  if (x[7] > 0.0)
    out += 3.0 * x[5] * x[6];
  else
    out += x[8] * x[9];
  return out;
}

}  // namespace

std::string to_string(ModelId id) {
  switch (id) {
    case ModelId::FirstOrder: return "first-order";
    case ModelId::SecondOrder: return "second-order";
    case ModelId::SecondOrderInteraction: return "second-order-interaction";
  }
  throw std::logic_error("to_string(ModelId)");
}

ModelId model_id_from_string(const std::string& s) {
  if (s == "first-order") return ModelId::FirstOrder;
  if (s == "second-order") return ModelId::SecondOrder;
  if (s == "second-order-interaction") return ModelId::SecondOrderInteraction;
  throw std::invalid_argument("unknown model id: " + s);
}

std::size_t model_dim(ModelId id) {
  return id == ModelId::FirstOrder ? 6u : 10u;
}

int model_metric_k(ModelId id) {
  switch (id) {
    case ModelId::FirstOrder: return 2;
    case ModelId::SecondOrder: return 3;
    case ModelId::SecondOrderInteraction: return 4;
  }
  throw std::logic_error("model_metric_k");
}

PiecewiseLinearModel switch_model(double a1, double a2, double a3, double a4) {
  // The boundary value x6 = 0 must fall in the "<= 0" branch; with half-open
  // intervals we put the cut just above zero.
  const double cut = std::nextafter(0.0, 1.0);
  PiecewiseLinearModel m;
  m.regions.assign(2, std::vector<Interval>(6));
  m.regions[0][5].hi = cut;
  m.regions[1][5].lo = cut;
  m.coefficients = Matrix(2, 6);
  m.coefficients(0, 0) = a1;
  m.coefficients(0, 1) = a2;
  m.coefficients(1, 2) = a3;
  m.coefficients(1, 3) = a4;
  m.intercepts = {0.0, 0.0};
  return m;
}

PiecewiseLinearModel first_order_model() { return switch_model(1, 1, 1, 1); }

PiecewiseLinearModel sign_switch_model() {
  PiecewiseLinearModel m;
  m.regions.assign(2, std::vector<Interval>(2));
  m.regions[0][0].hi = 0.0;  // x1 < 0
  m.regions[1][0].lo = 0.0;  // x1 >= 0
  m.coefficients = Matrix(2, 2);
  m.coefficients(0, 1) = -1.0;
  m.coefficients(1, 1) = 1.0;
  m.intercepts = {0.0, 0.0};
  return m;
}

SyntheticData generate(const SyntheticSpec& spec) {
  const std::size_t need = model_dim(spec.model);
  if (spec.p != need)
    throw std::invalid_argument("generate: model " + to_string(spec.model) +
                                " requires p = " + std::to_string(need));
  if (spec.n < 1) throw std::invalid_argument("generate: n >= 1");

  Rng rng(derive_seed(spec.seed, "features"));
  Matrix X(spec.n, spec.p);
  for (std::size_t i = 0; i < spec.n; ++i)
    for (std::size_t j = 0; j < spec.p; ++j) X(i, j) = rng.uniform(-1.0, 1.0);

  SyntheticData out;
  out.model = spec.model;
  out.metric_k = model_metric_k(spec.model);

  switch (spec.model) {
    case ModelId::FirstOrder: {
      out.pwl = first_order_model();
      out.evaluator = out.pwl->as_evaluator();
      out.truth.excluded = {5};
      out.truth.importance_convention =
          "abs(coefficient x component) of the active branch";
      break;
    }
    case ModelId::SecondOrder: {
      out.evaluator = second_order_eval;
      out.truth.excluded = {9};
      out.truth.importance_convention =
          "magnitude of each active additive component at x";
      break;
    }
    case ModelId::SecondOrderInteraction: {
      out.evaluator = interaction_eval;
      out.truth.excluded = {2, 7};
      out.truth.importance_convention =
          "abs(coefficient x partner value) per active product term";
      break;
    }
  }

  std::vector<double> y(spec.n);
  out.truth.true_importance = Matrix(spec.n, spec.p);
  out.truth.active_sets.resize(spec.n);
  out.truth.regime.resize(spec.n);

  for (std::size_t i = 0; i < spec.n; ++i) {
    auto x = X.row(i);
    y[i] = out.evaluator(x);
    auto& J = out.truth.active_sets[i];
    auto imp = [&](int j, double v) {
      out.truth.true_importance(i, static_cast<std::size_t>(j)) = v;
    };
    switch (spec.model) {
      case ModelId::FirstOrder:
        if (x[5] <= 0.0) {
          J = {0, 1};
          imp(0, std::abs(x[0]));
          imp(1, std::abs(x[1]));
          out.truth.regime[i] = 0;
        } else {
          J = {2, 3};
          imp(2, std::abs(x[2]));
          imp(3, std::abs(x[3]));
          out.truth.regime[i] = 1;
        }
        break;
      case ModelId::SecondOrder:
        if (x[9] <= 0.0) {
          J = {0, 1, 2};
          imp(0, std::abs(x[0]));
          imp(1, x[1] * x[1]);
          imp(2, std::sqrt(std::abs(x[2])));
          out.truth.regime[i] = 0;
        } else {
          J = {3, 4, 5};
          imp(3, std::abs(x[3]));
          imp(4, x[4] * x[4]);
          imp(5, std::sqrt(std::abs(x[5])));
          out.truth.regime[i] = 1;
        }
        break;
      case ModelId::SecondOrderInteraction: {
        int regime = 0;
        if (x[2] > 0.0) {
          J.push_back(0);
          J.push_back(1);
          imp(0, 3.0 * kRoot3 * std::abs(x[1]));
          imp(1, 3.0 * kRoot3 * std::abs(x[0]));
        } else {
          regime += 1;
          J.push_back(3);
          J.push_back(4);
          imp(3, kRoot3 * std::abs(x[4]));
          imp(4, kRoot3 * std::abs(x[3]));
        }
        if (x[7] > 0.0) {
          J.push_back(5);
          J.push_back(6);
          imp(5, 3.0 * std::abs(x[6]));
          imp(6, 3.0 * std::abs(x[5]));
        } else {
          regime += 2;
          J.push_back(8);
          J.push_back(9);
          imp(8, std::abs(x[9]));
          imp(9, std::abs(x[8]));
        }
        out.truth.regime[i] = regime;
        break;
      }
    }
  }

  std::vector<std::string> names(spec.p);
  for (std::size_t j = 0; j < spec.p; ++j) names[j] = "x" + std::to_string(j + 1);
  out.data = Dataset(std::move(X), std::move(y), std::move(names),
                     TaskKind::Regression);
  return out;
}

}  // namespace rloco
