#include "rloco/loco.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rloco/rng.hpp"

namespace rloco {

namespace {

void drop_into(std::span<const double> x, std::size_t j, std::vector<double>& out) {
  out.clear();
  for (std::size_t i = 0; i < x.size(); ++i)
    if (i != j) out.push_back(x[i]);
}

double conformity_prediction(const Predictor& m, std::span<const double> x,
                             TaskKind task) {
  return task == TaskKind::BinaryClassification ? m.predict_label(x)
                                                : m.predict(x);
}

}  // namespace

double LocoModels::predict_full(std::span<const double> x) const {
  return full.predict(x);
}

double LocoModels::predict_dropped(std::size_t j, std::span<const double> x) const {
  std::vector<double> reduced;
  drop_into(x, j, reduced);
  return dropped[j].predict(reduced);
}

LocoModels fit_loco(const Dataset& fit_data, const LearnerSpec& spec, int threads) {
  const std::size_t p = fit_data.p();
  LocoModels out;
  out.spec = spec;
  out.task = fit_data.task;
  out.sigma2_fit = population_variance(fit_data.target);
  out.dropped.resize(p);

  LearnerSpec full_spec = spec;
  full_spec.seed = derive_seed(spec.seed, "loco-full");
  out.full = fit(full_spec, fit_data);

  std::exception_ptr fail;
  std::size_t fail_j = 0;
  std::mutex fail_mu;
  auto fit_one = [&](std::size_t j) {
    try {
      LearnerSpec s = spec;
      s.seed = derive_seed(spec.seed, "loco-drop", j);
      out.dropped[j] = fit(s, fit_data.drop_feature(j));
    } catch (...) {
      std::lock_guard<std::mutex> lock(fail_mu);
      if (!fail) {
        fail = std::current_exception();
        fail_j = j;
      }
    }
  };

  const int n_workers = std::max(1, std::min<int>(threads, static_cast<int>(p)));
  if (n_workers <= 1) {
    for (std::size_t j = 0; j < p; ++j) fit_one(j);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int t = 0; t < n_workers; ++t)
      pool.emplace_back([&] {
        for (std::size_t j = next.fetch_add(1); j < p; j = next.fetch_add(1))
          fit_one(j);
      });
    for (auto& th : pool) th.join();
  }
  if (fail) {
    try {
      std::rethrow_exception(fail);
    } catch (const std::exception& e) {
      throw std::runtime_error("fit_loco: leave-out fit failed for feature " +
                               std::to_string(fail_j) + ": " + e.what());
    }
  }
  return out;
}

Matrix ImportanceRepresentation::concatenated() const {
  if (!enriched()) return deltas;
  const std::size_t n = deltas.rows(), p = deltas.cols();
  Matrix out(n, 2 * p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      out(i, j) = deltas(i, j);
      out(i, p + j) = (*signed_residuals)(i, j);
    }
  }
  return out;
}

std::string ImportanceRepresentation::to_tsv(
    const std::vector<std::string>& feature_names) const {
  const std::size_t p = deltas.cols();
  if (feature_names.size() != p)
    throw std::invalid_argument("ImportanceRepresentation::to_tsv: name mismatch");
  std::ostringstream os;
  os.precision(17);
  for (std::size_t j = 0; j < p; ++j)
    os << (j ? "\t" : "") << "delta_" << feature_names[j];
  if (enriched())
    for (std::size_t j = 0; j < p; ++j) os << "\tsigned_" << feature_names[j];
  os << "\n";
  for (std::size_t i = 0; i < deltas.rows(); ++i) {
    for (std::size_t j = 0; j < p; ++j) os << (j ? "\t" : "") << deltas(i, j);
    if (enriched())
      for (std::size_t j = 0; j < p; ++j) os << "\t" << (*signed_residuals)(i, j);
    os << "\n";
  }
  return os.str();
}

ImportanceRepresentation delta_scores(const LocoModels& models,
                                      const Dataset& eval_data,
                                      const ConformityScore& score,
                                      bool enriched) {
  const std::size_t n = eval_data.n();
  const std::size_t p = eval_data.p();
  if (p != models.p())
    throw std::invalid_argument("delta_scores: dimension mismatch");

  ImportanceRepresentation repr;
  repr.deltas = Matrix(n, p);
  if (enriched) repr.signed_residuals = Matrix(n, p);

  std::vector<double> reduced;
  for (std::size_t i = 0; i < n; ++i) {
    auto x = eval_data.features.row(i);
    const double y = eval_data.target[i];
    const double pred_full = models.full.predict(x);
    const double v_full = conformity(
        score, models.task == TaskKind::BinaryClassification
                   ? models.full.predict_label(x)
                   : pred_full,
        y);
    for (std::size_t j = 0; j < p; ++j) {
      drop_into(x, j, reduced);
      const double pred_drop = models.dropped[j].predict(reduced);
      const double v_drop =
          conformity(score, models.task == TaskKind::BinaryClassification
                                ? models.dropped[j].predict_label(reduced)
                                : pred_drop,
                     y);
      repr.deltas(i, j) = v_full - v_drop;
      if (enriched) (*repr.signed_residuals)(i, j) = pred_full - pred_drop;
    }
  }
  return repr;
}

PointImportance point_importance(const LocoModels& models,
                                 std::span<const double> x,
                                 std::optional<double> y,
                                 const ConformityScore& score) {
  const std::size_t p = models.p();
  PointImportance out;
  out.mode = y.has_value() ? TargetMode::Benchmark : TargetMode::Deployment;
  out.deltas.resize(p);
  out.signed_residuals.resize(p);

  const double pred_full = models.full.predict(x);
  const double target = y.value_or(pred_full);
  const double v_full =
      conformity(score, conformity_prediction(models.full, x, models.task), target);

  std::vector<double> reduced;
  for (std::size_t j = 0; j < p; ++j) {
    drop_into(x, j, reduced);
    const double pred_drop = models.dropped[j].predict(reduced);
    const double v_drop = conformity(
        score, models.task == TaskKind::BinaryClassification
                   ? models.dropped[j].predict_label(reduced)
                   : pred_drop,
        target);
    out.deltas[j] = v_full - v_drop;
    out.signed_residuals[j] = pred_full - pred_drop;
  }
  return out;
}

AttributionVector global_psi(const ImportanceRepresentation& repr) {
  const std::size_t n = repr.deltas.rows();
  const std::size_t p = repr.deltas.cols();
  if (n == 0) throw std::invalid_argument("global_psi: empty representation");
  AttributionVector out;
  out.method = "loco";
  out.scores.assign(p, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) out.scores[j] += repr.deltas(i, j);
  for (double& s : out.scores) s /= static_cast<double>(n);
  return out;
}

namespace {

ImportanceRepresentation finish_oracle(Matrix deltas, Matrix signed_res,
                                       std::span<const double> f_values,
                                       DeltaConvention convention, bool enriched) {
  if (convention == DeltaConvention::RSquaredNormalized) {
    const double sigma2 = population_variance(f_values);
    if (!(sigma2 > 0.0))
      throw std::runtime_error("oracle_deltas: zero target variance");
    for (std::size_t i = 0; i < deltas.rows(); ++i)
      for (std::size_t j = 0; j < deltas.cols(); ++j) deltas(i, j) /= sigma2;
  }
  ImportanceRepresentation repr;
  repr.deltas = std::move(deltas);
  if (enriched) repr.signed_residuals = std::move(signed_res);
  return repr;
}

}  // namespace

ImportanceRepresentation oracle_deltas(const PiecewiseLinearModel& model,
                                       const Matrix& x_rows,
                                       DeltaConvention convention, bool enriched) {
  const std::size_t n = x_rows.rows();
  const std::size_t p = x_rows.cols();
  if (p != model.dim()) throw std::invalid_argument("oracle_deltas: dim mismatch");

  Matrix deltas(n, p), signed_res(n, p);
  std::vector<double> f_values(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto x = x_rows.row(i);
    const double fx = model.evaluate(x);
    f_values[i] = fx;
    for (std::size_t j = 0; j < p; ++j) {
      const double residual = fx - model.conditional_mean_drop(x, j);
      deltas(i, j) = residual * residual;
      signed_res(i, j) = residual;
    }
  }
  return finish_oracle(std::move(deltas), std::move(signed_res), f_values,
                       convention, enriched);
}

ImportanceRepresentation oracle_deltas_mc(const Evaluator& f, const Matrix& x_rows,
                                          DeltaConvention convention, bool enriched,
                                          std::size_t mc_budget, std::uint64_t seed) {
  const std::size_t n = x_rows.rows();
  const std::size_t p = x_rows.cols();
  Matrix deltas(n, p), signed_res(n, p);
  std::vector<double> f_values(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto x = x_rows.row(i);
    const double fx = f(x);
    f_values[i] = fx;
    for (std::size_t j = 0; j < p; ++j) {
      const double fmj = conditional_mean_drop_mc(
          f, x, j, mc_budget, derive_seed(seed, "oracle-drop", i * p + j), &x_rows);
      const double residual = fx - fmj;
      deltas(i, j) = residual * residual;
      signed_res(i, j) = residual;
    }
  }
  return finish_oracle(std::move(deltas), std::move(signed_res), f_values,
                       convention, enriched);
}

}  // namespace rloco
