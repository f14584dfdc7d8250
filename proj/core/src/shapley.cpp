#include "rloco/shapley.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "rloco/rng.hpp"

namespace rloco {

namespace {

// w(|S|) = 1 / (p * C(p-1, |S|)) for |S| = 0..p-1.
std::vector<double> subset_weights(std::size_t p) {
  std::vector<double> w(p);
  double binom = 1.0;  // C(p-1, s)
  for (std::size_t s = 0; s < p; ++s) {
    w[s] = 1.0 / (static_cast<double>(p) * binom);
    binom = binom * static_cast<double>(p - 1 - s) / static_cast<double>(s + 1);
  }
  return w;
}

// sum_{S subseteq items} weight(|S|) * prod_{i in S} alpha_i * prod_{j notin S} beta_j,
// via the coefficients of prod_i (beta_i + alpha_i z).
double weighted_subset_sum(std::span<const double> alpha,
                           std::span<const double> beta,
                           std::span<const double> weight_by_size) {
  const std::size_t t = alpha.size();
  std::vector<double> c(t + 1, 0.0);
  c[0] = 1.0;
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t s = i + 1; s-- > 0;) {
      c[s + 1] += c[s] * alpha[i];
      c[s] *= beta[i];
    }
  double acc = 0.0;
  for (std::size_t s = 0; s <= t; ++s) acc += weight_by_size[s] * c[s];
  return acc;
}

struct RegionTables {
  std::vector<double> ind;    // indicator of x_i in A_{i,k}
  std::vector<double> prob;   // P(X_i in A_{i,k})
  std::vector<double> first;  // E[X_i 1{X_i in A_{i,k}}]
  bool degenerate = false;    // some dimension has zero probability
};

RegionTables region_tables(const PiecewiseLinearModel& model,
                           std::span<const double> x, std::size_t k) {
  const std::size_t p = model.dim();
  RegionTables t;
  t.ind.resize(p);
  t.prob.resize(p);
  t.first.resize(p);
  for (std::size_t i = 0; i < p; ++i) {
    const Interval& iv = model.regions[k][i];
    t.ind[i] = iv.contains(x[i]) ? 1.0 : 0.0;
    t.prob[i] = PiecewiseLinearModel::interval_prob(iv);
    t.first[i] = PiecewiseLinearModel::interval_first_moment(iv);
    if (t.prob[i] == 0.0) t.degenerate = true;
  }
  return t;
}

}  // namespace

AttributionVector lsv_closed_form(const PiecewiseLinearModel& model,
                                  std::span<const double> x) {
  const std::size_t p = model.dim();
  if (x.size() != p)
    throw std::invalid_argument("lsv_closed_form: dimension mismatch");
  const std::vector<double> w = subset_weights(p);

  AttributionVector out;
  out.method = "lsv-closed-form";
  out.scores.assign(p, 0.0);

  // Scratch for the leave-l (and leave-l,i) factor lists.
  std::vector<double> alpha(p), beta(p);
  std::vector<double> w_shift(p);  // weight(s') = w[s'+1] for the G sums

  for (std::size_t k = 0; k < model.num_regions(); ++k) {
    const RegionTables t = region_tables(model, x, k);
    if (t.degenerate) continue;  // measure-zero region contributes nothing

    for (std::size_t l = 0; l < p; ++l) {
      const double a_l = model.coefficients(k, l);
      const double b_k = model.intercepts[k];

      // Factors over D \ {l}.
      std::size_t m = 0;
      for (std::size_t i = 0; i < p; ++i) {
        if (i == l) continue;
        alpha[m] = t.ind[i];
        beta[m] = t.prob[i];
        ++m;
      }
      const double f0 = weighted_subset_sum({alpha.data(), m}, {beta.data(), m},
                                            {w.data(), m + 1});

      // Second term of the decomposition: the direct linear contribution.
      double phi = a_l * (x[l] - t.first[l] / t.prob[l]) * t.ind[l] * f0;

      // First term: (1/P_l - 1)-weighted average of v_k over subsets.
      const double lever = t.ind[l] / t.prob[l] - 1.0;
      if (lever != 0.0) {
        double v_avg = a_l * t.first[l] * f0 + b_k * t.prob[l] * f0;
        for (std::size_t i = 0; i < p; ++i) {
          if (i == l) continue;
          const double a_i = model.coefficients(k, i);
          if (a_i == 0.0) continue;
          // Factors over D \ {l, i}.
          std::size_t mm = 0;
          for (std::size_t j = 0; j < p; ++j) {
            if (j == l || j == i) continue;
            alpha[mm] = t.ind[j];
            beta[mm] = t.prob[j];
            ++mm;
          }
          for (std::size_t s = 0; s <= mm; ++s) w_shift[s] = w[s + 1];
          const double g_i = weighted_subset_sum(
              {alpha.data(), mm}, {beta.data(), mm}, {w_shift.data(), mm + 1});
          const double h_i = weighted_subset_sum(
              {alpha.data(), mm}, {beta.data(), mm}, {w.data(), mm + 1});
          v_avg += t.prob[l] * a_i * (x[i] * t.ind[i] * g_i + t.first[i] * h_i);
        }
        phi += lever * v_avg;
      }

      out.scores[l] += phi;
    }
  }
  return out;
}

AttributionVector lsv_enumeration(const PiecewiseLinearModel& model,
                                  std::span<const double> x) {
  const std::size_t p = model.dim();
  if (x.size() != p)
    throw std::invalid_argument("lsv_enumeration: dimension mismatch");
  if (p > 20)
    throw std::invalid_argument("lsv_enumeration: p <= 20 required");

  const std::size_t n_masks = std::size_t{1} << p;
  std::vector<double> v(n_masks, 0.0);
  for (std::size_t mask = 0; mask < n_masks; ++mask) {
    double acc = 0.0;
    for (std::size_t k = 0; k < model.num_regions(); ++k)
      acc += model.value_function_mask(x, static_cast<std::uint32_t>(mask), k);
    v[mask] = acc;
  }

  const std::vector<double> w = subset_weights(p);
  AttributionVector out;
  out.method = "lsv-enumeration";
  out.scores.assign(p, 0.0);
  for (std::size_t l = 0; l < p; ++l) {
    const std::size_t bit = std::size_t{1} << l;
    double phi = 0.0;
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
      if (mask & bit) continue;
      phi += w[static_cast<std::size_t>(std::popcount(mask))] *
             (v[mask | bit] - v[mask]);
    }
    out.scores[l] = phi;
  }
  return out;
}

AttributionVector lsv_monte_carlo(const Evaluator& f, const Matrix& background,
                                  std::span<const double> x,
                                  const ShapleyConfig& cfg) {
  const std::size_t p = x.size();
  if (background.rows() == 0 || background.cols() != p)
    throw std::invalid_argument("lsv_monte_carlo: bad background");
  if (cfg.mc_samples_per_subset == 0)
    throw std::invalid_argument("lsv_monte_carlo: zero sample budget");

  Rng rng(cfg.seed);
  AttributionVector out;
  out.method = "lsv-mc";
  out.scores.assign(p, 0.0);
  std::vector<double> z(p);

  if (p <= 12) {
    // Shared background rows across all subsets.
    std::vector<int> rows(background.rows());
    std::iota(rows.begin(), rows.end(), 0);
    if (rows.size() > cfg.mc_samples_per_subset) {
      for (std::size_t i = rows.size(); i > 1; --i)
        std::swap(rows[i - 1], rows[rng.index(i)]);
      rows.resize(cfg.mc_samples_per_subset);
    }
    const double inv_b = 1.0 / static_cast<double>(rows.size());

    const std::size_t n_masks = std::size_t{1} << p;
    std::vector<double> v(n_masks, 0.0);
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
      double acc = 0.0;
      for (int r : rows) {
        auto bg = background.row(static_cast<std::size_t>(r));
        for (std::size_t i = 0; i < p; ++i)
          z[i] = (mask & (std::size_t{1} << i)) ? x[i] : bg[i];
        acc += f(z);
      }
      v[mask] = acc * inv_b;
    }

    const std::vector<double> w = subset_weights(p);
    for (std::size_t l = 0; l < p; ++l) {
      const std::size_t bit = std::size_t{1} << l;
      double phi = 0.0;
      for (std::size_t mask = 0; mask < n_masks; ++mask) {
        if (mask & bit) continue;
        phi += w[static_cast<std::size_t>(std::popcount(mask))] *
               (v[mask | bit] - v[mask]);
      }
      out.scores[l] = phi;
    }
    return out;
  }

  // Permutation sampling: each pass walks one random feature order against a
  // random background row.
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t pass = 0; pass < cfg.mc_samples_per_subset; ++pass) {
    for (std::size_t i = p; i > 1; --i)
      std::swap(order[i - 1], order[rng.index(i)]);
    auto bg = background.row(rng.index(background.rows()));
    std::copy(bg.begin(), bg.end(), z.begin());
    double prev = f(z);
    for (std::size_t step = 0; step < p; ++step) {
      z[order[step]] = x[order[step]];
      double cur = f(z);
      out.scores[order[step]] += cur - prev;
      prev = cur;
    }
  }
  const double inv = 1.0 / static_cast<double>(cfg.mc_samples_per_subset);
  for (double& s : out.scores) s *= inv;
  return out;
}

}  // namespace rloco
