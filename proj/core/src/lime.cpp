#include "rloco/lime.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "rloco/rng.hpp"

namespace rloco {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> column_std(const Matrix& x) {
  const std::size_t n = x.rows(), p = x.cols();
  std::vector<double> mean(p, 0.0), sd(p, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) mean[j] += x(i, j);
  for (double& m : mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      double d = x(i, j) - mean[j];
      sd[j] += d * d;
    }
  for (double& s : sd) s = std::sqrt(s / static_cast<double>(n));
  return sd;
}

// Interior quantile thresholds per feature (bins-1 edges each).
std::vector<std::vector<double>> bin_edges(const Matrix& x, int bins) {
  const std::size_t p = x.cols();
  std::vector<std::vector<double>> edges(p);
  std::vector<double> col(x.rows());
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < x.rows(); ++i) col[i] = x(i, j);
    std::sort(col.begin(), col.end());
    for (int b = 1; b < bins; ++b) {
      double q = static_cast<double>(b) / bins;
      double pos = q * static_cast<double>(col.size() - 1);
      std::size_t lo = static_cast<std::size_t>(pos);
      double frac = pos - static_cast<double>(lo);
      edges[j].push_back(col[lo] +
                         frac * (col[std::min(lo + 1, col.size() - 1)] - col[lo]));
    }
  }
  return edges;
}

int bin_of(const std::vector<double>& edges, double v) {
  return static_cast<int>(std::upper_bound(edges.begin(), edges.end(), v) -
                          edges.begin());
}

struct RidgeFit {
  std::vector<double> coef;
  double intercept = 0.0;
};

// Weighted ridge with an unpenalized intercept (fit on weighted-centered
// data).
RidgeFit weighted_ridge(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& w, double penalty) {
  const Eigen::Index p = design.cols();
  const double wsum = w.sum();
  Eigen::RowVectorXd xmean = (w.asDiagonal() * design).colwise().sum() / wsum;
  const double ymean = w.dot(y) / wsum;
  Eigen::MatrixXd xc = design.rowwise() - xmean;
  Eigen::VectorXd yc = y.array() - ymean;

  Eigen::MatrixXd gram = xc.transpose() * (w.asDiagonal() * xc);
  gram.diagonal().array() += penalty;
  Eigen::VectorXd rhs = xc.transpose() * (w.cwiseProduct(yc));
  Eigen::VectorXd beta = gram.ldlt().solve(rhs);

  if (penalty == 0.0) {
    double resid = (gram * beta - rhs).cwiseAbs().maxCoeff();
    double scale = rhs.cwiseAbs().maxCoeff() + 1.0;
    if (!beta.allFinite() || resid > 1e-8 * scale)
      throw std::runtime_error(
          "explain_lime: singular weighted design; use a positive ridge_penalty");
  }

  RidgeFit fit;
  fit.coef.assign(beta.data(), beta.data() + p);
  fit.intercept = ymean - xmean * beta;
  return fit;
}

}  // namespace

double median_bandwidth(const Dataset& data) {
  const std::size_t n = data.n();
  if (n < 2) throw std::invalid_argument("median_bandwidth: need n >= 2");

  std::vector<int> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  constexpr std::size_t kCap = 2000;
  if (n > kCap) {
    Rng rng(derive_seed(0x9a7c1f, "median-bandwidth"));
    for (std::size_t i = n; i > 1; --i)
      std::swap(rows[i - 1], rows[rng.index(i)]);
    rows.resize(kCap);
  }

  const std::size_t m = rows.size();
  std::vector<double> dist;
  dist.reserve(m * (m - 1) / 2);
  for (std::size_t a = 0; a < m; ++a) {
    auto ra = data.features.row(static_cast<std::size_t>(rows[a]));
    for (std::size_t b = a + 1; b < m; ++b) {
      auto rb = data.features.row(static_cast<std::size_t>(rows[b]));
      double acc = 0.0;
      for (std::size_t j = 0; j < data.p(); ++j) {
        double d = ra[j] - rb[j];
        acc += d * d;
      }
      dist.push_back(std::sqrt(acc));
    }
  }
  std::sort(dist.begin(), dist.end());
  double med;
  if (dist.size() % 2 == 1)
    med = dist[dist.size() / 2];
  else
    med = 0.5 * (dist[dist.size() / 2 - 1] + dist[dist.size() / 2]);
  if (med == 0.0)
    throw std::runtime_error("median_bandwidth: zero bandwidth (identical points)");
  return med;
}

LimeExplainer::LimeExplainer(const Dataset& background, LimeConfig cfg)
    : background_(background.features), cfg_(std::move(cfg)) {
  const std::size_t p = background.p();
  if (cfg_.num_samples < p + 2)
    throw std::invalid_argument("LimeExplainer: num_samples must be >= p + 2");
  if (cfg_.ridge_penalty < 0.0)
    throw std::invalid_argument("LimeExplainer: ridge_penalty must be >= 0");

  if (cfg_.bandwidth.has_value()) {
    if (!(*cfg_.bandwidth > 0.0))
      throw std::invalid_argument("LimeExplainer: bandwidth must be positive");
    width_ = *cfg_.bandwidth;
  } else if (cfg_.discretize) {
    width_ = 0.75 * std::sqrt(static_cast<double>(p));
  } else {
    width_ = median_bandwidth(background);
  }

  scale_.assign(p, 1.0);
  if (cfg_.standardize && !cfg_.discretize) {
    scale_ = column_std(background_);
    for (double& s : scale_)
      if (s == 0.0) s = 1.0;
  }
  if (cfg_.discretize) {
    if (cfg_.bins < 2)
      throw std::invalid_argument("LimeExplainer: bins must be >= 2");
    edges_ = bin_edges(background_, cfg_.bins);
  }
}

LimeExplanation LimeExplainer::explain_at(const Evaluator& f,
                                          std::span<const double> x,
                                          std::uint64_t seed, double width) const {
  const std::size_t p = background_.cols();
  if (x.size() != p)
    throw std::invalid_argument("LimeExplainer::explain: dimension mismatch");
  const std::size_t n_bg = background_.rows();
  const std::size_t n_s = cfg_.num_samples;

  Rng rng(seed);
  Matrix samples(n_s, p);
  for (std::size_t i = 0; i < n_s; ++i)
    for (std::size_t j = 0; j < p; ++j)
      samples(i, j) = background_(rng.index(n_bg), j);

  Eigen::VectorXd y(n_s);
  std::vector<double> z(p);
  for (std::size_t i = 0; i < n_s; ++i) {
    auto row = samples.row(i);
    std::copy(row.begin(), row.end(), z.begin());
    y(static_cast<Eigen::Index>(i)) = f(z);
  }

  Eigen::MatrixXd design(n_s, p);
  Eigen::VectorXd w(n_s);

  if (cfg_.discretize) {
    std::vector<int> x_bin(p);
    for (std::size_t j = 0; j < p; ++j) x_bin[j] = bin_of(edges_[j], x[j]);
    for (std::size_t i = 0; i < n_s; ++i) {
      double mismatches = 0.0;
      for (std::size_t j = 0; j < p; ++j) {
        bool same = bin_of(edges_[j], samples(i, j)) == x_bin[j];
        design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            same ? 1.0 : 0.0;
        if (!same) mismatches += 1.0;
      }
      // reference-implementation kernel on the indicator mismatch count
      w(static_cast<Eigen::Index>(i)) =
          std::exp(-mismatches / (2.0 * width * width));
    }
  } else {
    for (std::size_t i = 0; i < n_s; ++i) {
      double d2 = 0.0;
      for (std::size_t j = 0; j < p; ++j) {
        double diff = (samples(i, j) - x[j]) / scale_[j];
        d2 += diff * diff;
        design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            samples(i, j);
      }
      w(static_cast<Eigen::Index>(i)) = std::exp(-d2 / (width * width));
    }
  }

  RidgeFit fit = weighted_ridge(design, y, w, cfg_.ridge_penalty);
  LimeExplanation out;
  out.attribution.method = cfg_.discretize ? "lime-discretized" : "lime";
  out.attribution.scores = std::move(fit.coef);
  out.intercept = fit.intercept;
  out.bandwidth = width;
  return out;
}

LimeExplanation LimeExplainer::explain(const Evaluator& f,
                                       std::span<const double> x,
                                       std::uint64_t seed) const {
  return explain_at(f, x, seed, width_);
}

LimeExplanation explain_lime(const Evaluator& f, const Dataset& background,
                             std::span<const double> x, const LimeConfig& cfg) {
  return LimeExplainer(background, cfg).explain(f, x, cfg.seed);
}

BandwidthSensitivity bandwidth_sensitivity(const Evaluator& f,
                                           const Dataset& background,
                                           std::span<const double> x,
                                           const LimeConfig& cfg) {
  LimeExplainer explainer(background, cfg);
  const double h = explainer.bandwidth();
  LimeExplanation at_h = explainer.explain_at(f, x, cfg.seed, h);
  LimeExplanation at_half = explainer.explain_at(f, x, cfg.seed, h / 2.0);

  BandwidthSensitivity out;
  out.h = h;
  out.h_half = h / 2.0;
  const std::size_t p = at_h.attribution.scores.size();
  out.relative_errors.resize(p);
  out.sign_flips.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    double a = at_h.attribution.scores[j];
    double b = at_half.attribution.scores[j];
    out.relative_errors[j] = a == 0.0 ? kInf : (a - b) / a;
    out.sign_flips[j] = a * b < 0.0;
  }
  return out;
}

std::vector<double> seed_instability(const Evaluator& f, const Dataset& background,
                                     std::span<const double> x,
                                     const LimeConfig& cfg, std::size_t runs) {
  if (runs < 2) throw std::invalid_argument("seed_instability: runs >= 2");
  LimeExplainer explainer(background, cfg);
  const std::size_t p = background.p();
  std::vector<double> sum(p, 0.0), sum2(p, 0.0);
  for (std::size_t r = 0; r < runs; ++r) {
    LimeExplanation e =
        explainer.explain(f, x, derive_seed(cfg.seed, "lime-instability", r));
    for (std::size_t j = 0; j < p; ++j) {
      sum[j] += e.attribution.scores[j];
      sum2[j] += e.attribution.scores[j] * e.attribution.scores[j];
    }
  }
  std::vector<double> sd(p);
  const double n = static_cast<double>(runs);
  for (std::size_t j = 0; j < p; ++j) {
    double var = (sum2[j] - sum[j] * sum[j] / n) / (n - 1.0);
    sd[j] = std::sqrt(std::max(0.0, var));
  }
  return sd;
}

}  // namespace rloco
