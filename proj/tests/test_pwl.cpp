#include <doctest.h>

#include <cmath>

#include "rloco/pwl.hpp"
#include "rloco/rng.hpp"
#include "rloco/synthetic.hpp"

using namespace rloco;

TEST_CASE("single-region linear model evaluates as a dot product") {
  PiecewiseLinearModel m;
  m.regions.assign(1, std::vector<Interval>(2));
  m.coefficients = Matrix(1, 2);
  m.coefficients(0, 0) = 2.0;
  m.intercepts = {1.0};
  std::vector<double> x = {3.0, 7.0};
  CHECK(m.evaluate(x) == doctest::Approx(7.0));
}

TEST_CASE("first-order model branches, boundary included on the left") {
  PiecewiseLinearModel m = first_order_model();
  std::vector<double> x = {0.5, -0.3, 0.9, 0.1, 0.0, -0.2};
  CHECK(m.evaluate(x) == doctest::Approx(0.2));
  x[5] = 0.0;  // the x6 = 0 boundary belongs to the "<= 0" branch
  CHECK(m.evaluate(x) == doctest::Approx(0.2));
  CHECK(m.region_index(x) == 0);
  x[5] = 1e-12;
  CHECK(m.evaluate(x) == doctest::Approx(0.9 + 0.1));
}

TEST_CASE("random two-region model matches a manual per-region dot product") {
  PiecewiseLinearModel m = random_partition_model(4, 2, 99);
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x(4);
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    int k = m.region_index(x);
    REQUIRE(k >= 0);
    double manual = m.intercepts[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < 4; ++i)
      manual += m.coefficients(static_cast<std::size_t>(k), i) * x[i];
    CHECK(m.evaluate(x) == doctest::Approx(manual));
  }
}

TEST_CASE("interval moments under U[-1,1]") {
  Interval whole;  // (-inf, inf)
  CHECK(PiecewiseLinearModel::interval_prob(whole) == doctest::Approx(1.0));
  CHECK(PiecewiseLinearModel::interval_first_moment(whole) == doctest::Approx(0.0));
  Interval left{-std::numeric_limits<double>::infinity(), 0.0};
  CHECK(PiecewiseLinearModel::interval_prob(left) == doctest::Approx(0.5));
  CHECK(PiecewiseLinearModel::interval_first_moment(left) == doctest::Approx(-0.25));
  Interval empty{2.0, 3.0};
  CHECK(PiecewiseLinearModel::interval_prob(empty) == 0.0);
}

TEST_CASE("conditional mean drop on the first-order model (exact)") {
  PiecewiseLinearModel m = first_order_model();
  std::vector<double> x = {0.4, -0.7, 0.2, 0.6, 0.3, -0.5};
  // dropping an active branch feature leaves the partner
  CHECK(m.conditional_mean_drop(x, 0) == doctest::Approx(-0.7));
  // dropping the switch mixes both branches equally
  CHECK(m.conditional_mean_drop(x, 5) ==
        doctest::Approx(0.5 * (0.4 - 0.7) + 0.5 * (0.2 + 0.6)));
  // dropping an inactive feature changes nothing
  CHECK(m.conditional_mean_drop(x, 2) == doctest::Approx(m.evaluate(x)));
}

TEST_CASE("conditional mean drop of a constant model is the constant") {
  PiecewiseLinearModel m;
  m.regions.assign(1, std::vector<Interval>(3));
  m.coefficients = Matrix(1, 3);
  m.intercepts = {4.2};
  std::vector<double> x = {0.1, 0.2, 0.3};
  for (std::size_t j = 0; j < 3; ++j)
    CHECK(m.conditional_mean_drop(x, j) == doctest::Approx(4.2));
}

TEST_CASE("value function: full conditioning and empty set") {
  PiecewiseLinearModel m = first_order_model();
  std::vector<double> x = {0.4, -0.7, 0.2, 0.6, 0.3, -0.5};
  // S = [p]: no expectation remains, v_k = f_k(x) 1{x in A_k}
  double v0 = analytic_value_function(m, x, std::vector<int>{0, 1, 2, 3, 4, 5}, 0);
  CHECK(v0 == doctest::Approx(0.4 - 0.7));
  double v1 = analytic_value_function(m, x, std::vector<int>{0, 1, 2, 3, 4, 5}, 1);
  CHECK(v1 == 0.0);

  // S = empty over a single unbounded region with zero intercept: E[X_i] = 0
  PiecewiseLinearModel lin;
  lin.regions.assign(1, std::vector<Interval>(3));
  lin.coefficients = Matrix(1, 3, 1.5);
  lin.intercepts = {0.0};
  CHECK(analytic_value_function(lin, x, std::vector<int>{}, 0) ==
        doctest::Approx(0.0));
}

TEST_CASE("value function matches a Monte-Carlo estimate") {
  PiecewiseLinearModel m = random_partition_model(4, 3, 123);
  Rng rng(17);
  std::vector<double> x(4);
  for (double& v : x) v = rng.uniform(-1.0, 1.0);
  std::vector<int> subset = {1, 3};

  for (std::size_t k = 0; k < m.num_regions(); ++k) {
    const double analytic = analytic_value_function(m, x, subset, k);
    // MC oracle: resample the unconditioned coordinates, keep x on S
    const std::size_t budget = 1000000;
    double acc = 0.0, acc2 = 0.0;
    std::vector<double> z = x;
    for (std::size_t b = 0; b < budget; ++b) {
      z[0] = rng.uniform(-1.0, 1.0);
      z[2] = rng.uniform(-1.0, 1.0);
      double val = 0.0;
      bool inside = true;
      for (std::size_t i = 0; i < 4; ++i)
        if (!m.regions[k][i].contains(z[i])) inside = false;
      if (inside) {
        val = m.intercepts[k];
        for (std::size_t i = 0; i < 4; ++i) val += m.coefficients(k, i) * z[i];
      }
      acc += val;
      acc2 += val * val;
    }
    const double mc = acc / budget;
    const double se = std::sqrt((acc2 / budget - mc * mc) / budget);
    CHECK(std::abs(analytic - mc) < 3.0 * se + 1e-12);
  }
}

TEST_CASE("law of total expectation: sum of v_k(empty) equals E[f] by MC") {
  PiecewiseLinearModel m = random_partition_model(5, 4, 321);
  const double analytic = m.mean();
  Rng rng(23);
  const std::size_t budget = 1000000;
  double acc = 0.0, acc2 = 0.0;
  std::vector<double> z(5);
  for (std::size_t b = 0; b < budget; ++b) {
    for (double& v : z) v = rng.uniform(-1.0, 1.0);
    double val = m.evaluate(z);
    acc += val;
    acc2 += val * val;
  }
  const double mc = acc / budget;
  const double se = std::sqrt((acc2 / budget - mc * mc) / budget);
  CHECK(std::abs(analytic - mc) < 3.0 * se + 1e-12);
}

TEST_CASE("measure-zero region contributes nothing") {
  PiecewiseLinearModel m;
  m.regions.assign(1, std::vector<Interval>(2));
  m.regions[0][0] = {2.0, 3.0};  // outside the support
  m.coefficients = Matrix(1, 2, 1.0);
  m.intercepts = {5.0};
  std::vector<double> x = {2.5, 0.0};
  CHECK(analytic_value_function(m, x, std::vector<int>{0}, 0) == 0.0);
  CHECK(analytic_value_function(m, x, std::vector<int>{}, 0) == 0.0);
}

TEST_CASE("first-order model variance is 2/3 (MC within 1%)") {
  PiecewiseLinearModel m = first_order_model();
  Rng rng(31);
  const std::size_t budget = 1000000;
  double acc = 0.0, acc2 = 0.0;
  std::vector<double> z(6);
  for (std::size_t b = 0; b < budget; ++b) {
    for (double& v : z) v = rng.uniform(-1.0, 1.0);
    double val = m.evaluate(z);
    acc += val;
    acc2 += val * val;
  }
  double var = acc2 / budget - (acc / budget) * (acc / budget);
  CHECK(var == doctest::Approx(2.0 / 3).epsilon(0.01));
}

TEST_CASE("JSON round-trip is bit-exact") {
  PiecewiseLinearModel m = random_partition_model(3, 3, 777);
  m.coefficients(0, 0) = 0.1 + 0.2;  // a value without a short decimal form
  PiecewiseLinearModel r = PiecewiseLinearModel::from_json(m.to_json());
  REQUIRE(r.num_regions() == m.num_regions());
  for (std::size_t k = 0; k < m.num_regions(); ++k) {
    CHECK(r.intercepts[k] == m.intercepts[k]);
    for (std::size_t i = 0; i < m.dim(); ++i) {
      CHECK(r.coefficients(k, i) == m.coefficients(k, i));
      CHECK(r.regions[k][i].lo == m.regions[k][i].lo);
      CHECK(r.regions[k][i].hi == m.regions[k][i].hi);
    }
  }
  CHECK(r.to_json() == m.to_json());
}

TEST_CASE("MC conditional mean drop approaches the closed form") {
  PiecewiseLinearModel m = first_order_model();
  Evaluator f = m.as_evaluator();
  std::vector<double> x = {0.4, -0.7, 0.2, 0.6, 0.3, -0.5};
  double exact = m.conditional_mean_drop(x, 5);
  double mc = conditional_mean_drop_mc(f, x, 5, 200000, 42);
  CHECK(mc == doctest::Approx(exact).epsilon(0.02));
  CHECK_THROWS_AS(conditional_mean_drop_mc(f, x, 5, 0, 1), std::invalid_argument);
}

TEST_CASE("synthetic generators") {
  SyntheticSpec spec;
  spec.model = ModelId::SecondOrderInteraction;
  spec.p = 10;
  spec.n = 50;
  spec.seed = 9;
  SyntheticData gen = generate(spec);
  CHECK(gen.metric_k == 4);
  CHECK(gen.truth.excluded == std::vector<int>{2, 7});
  for (std::size_t i = 0; i < gen.data.n(); ++i) {
    auto x = gen.data.features.row(i);
    double expected = 0.0;
    if (x[2] > 0)
      expected += 3.0 * std::sqrt(3.0) * x[0] * x[1];
    else
      expected += std::sqrt(3.0) * x[3] * x[4];
    if (x[7] > 0)
      expected += 3.0 * x[5] * x[6];
    else
      expected += x[8] * x[9];
    CHECK(gen.data.target[i] == doctest::Approx(expected));
    CHECK(gen.truth.active_sets[i].size() == 4);
  }

  SyntheticSpec bad = spec;
  bad.p = 6;
  CHECK_THROWS_AS(generate(bad), std::invalid_argument);

  SyntheticSpec first;
  first.model = ModelId::FirstOrder;
  first.p = 6;
  first.n = 20;
  first.seed = 4;
  SyntheticData g1 = generate(first);
  REQUIRE(g1.pwl.has_value());
  for (std::size_t i = 0; i < g1.data.n(); ++i) {
    auto x = g1.data.features.row(i);
    if (x[5] > 0) {
      CHECK(g1.truth.active_sets[i] == std::vector<int>{2, 3});
    } else {
      CHECK(g1.truth.active_sets[i] == std::vector<int>{0, 1});
    }
  }
}

TEST_CASE("sign-switch counterexample model") {
  PiecewiseLinearModel m = sign_switch_model();
  std::vector<double> x = {-0.5, 0.8};
  CHECK(m.evaluate(x) == doctest::Approx(-0.8));
  x[0] = 0.0;  // x1 = 0 belongs to the right branch (x1 >= 0)
  CHECK(m.evaluate(x) == doctest::Approx(0.8));
}
