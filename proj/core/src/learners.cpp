#include "rloco/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "rloco/rng.hpp"

namespace rloco {

namespace {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct Tree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> x) const {
    int id = 0;
    while (nodes[static_cast<std::size_t>(id)].feature >= 0) {
      const TreeNode& n = nodes[static_cast<std::size_t>(id)];
      id = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(id)].value;
  }
};

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X, std::span<const double> y, const LearnerSpec& spec,
              int mtry, Rng* rng)
      : X_(X), y_(y), spec_(spec), mtry_(mtry), rng_(rng) {}

  Tree build(std::vector<int> rows) {
    Tree tree;
    grow(tree, std::move(rows), 0);
    return tree;
  }

 private:
  int grow(Tree& tree, std::vector<int> rows, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    double sum = 0.0, sum2 = 0.0;
    for (int r : rows) {
      double v = y_[static_cast<std::size_t>(r)];
      sum += v;
      sum2 += v * v;
    }
    const double n = static_cast<double>(rows.size());
    const double node_sse = sum2 - sum * sum / n;
    tree.nodes[static_cast<std::size_t>(id)].value = sum / n;

    const bool depth_ok = spec_.max_depth < 0 || depth < spec_.max_depth;
    if (!depth_ok || rows.size() < 2 * static_cast<std::size_t>(spec_.min_leaf) ||
        node_sse <= 1e-12)
      return id;

    SplitChoice best = find_split(rows, node_sse);
    if (best.feature < 0) return id;

    std::vector<int> left, right;
    left.reserve(rows.size());
    right.reserve(rows.size());
    for (int r : rows) {
      if (X_(static_cast<std::size_t>(r), static_cast<std::size_t>(best.feature)) <=
          best.threshold)
        left.push_back(r);
      else
        right.push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    tree.nodes[static_cast<std::size_t>(id)].feature = best.feature;
    tree.nodes[static_cast<std::size_t>(id)].threshold = best.threshold;
    int l = grow(tree, std::move(left), depth + 1);
    tree.nodes[static_cast<std::size_t>(id)].left = l;
    int r = grow(tree, std::move(right), depth + 1);
    tree.nodes[static_cast<std::size_t>(id)].right = r;
    return id;
  }

  // Exact split search: candidates are midpoints of consecutive distinct
  // sorted values; ties in gain break toward the lowest feature index and
  // then the lowest threshold (features and thresholds scanned ascending,
  // improvements must be strict).
  SplitChoice find_split(const std::vector<int>& rows, double node_sse) {
    const std::size_t p = X_.cols();
    std::vector<int> features(p);
    std::iota(features.begin(), features.end(), 0);
    if (mtry_ > 0 && static_cast<std::size_t>(mtry_) < p && rng_ != nullptr) {
      for (std::size_t i = 0; i < static_cast<std::size_t>(mtry_); ++i)
        std::swap(features[i], features[i + rng_->index(p - i)]);
      features.resize(static_cast<std::size_t>(mtry_));
      std::sort(features.begin(), features.end());
    }

    SplitChoice best;
    std::vector<int> order;
    for (int f : features) {
      order = rows;
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        double xa = X_(static_cast<std::size_t>(a), static_cast<std::size_t>(f));
        double xb = X_(static_cast<std::size_t>(b), static_cast<std::size_t>(f));
        if (xa != xb) return xa < xb;
        return a < b;
      });

      double left_sum = 0.0, left_sum2 = 0.0;
      double total_sum = 0.0, total_sum2 = 0.0;
      for (int r : order) {
        double v = y_[static_cast<std::size_t>(r)];
        total_sum += v;
        total_sum2 += v * v;
      }
      const std::size_t n = order.size();
      for (std::size_t i = 0; i + 1 < n; ++i) {
        double v = y_[static_cast<std::size_t>(order[i])];
        left_sum += v;
        left_sum2 += v * v;
        const double xl = X_(static_cast<std::size_t>(order[i]),
                             static_cast<std::size_t>(f));
        const double xr = X_(static_cast<std::size_t>(order[i + 1]),
                             static_cast<std::size_t>(f));
        if (xl == xr) continue;
        const std::size_t nl = i + 1, nr = n - nl;
        if (nl < static_cast<std::size_t>(spec_.min_leaf) ||
            nr < static_cast<std::size_t>(spec_.min_leaf))
          continue;
        const double right_sum = total_sum - left_sum;
        const double right_sum2 = total_sum2 - left_sum2;
        const double sse = (left_sum2 - left_sum * left_sum / static_cast<double>(nl)) +
                           (right_sum2 - right_sum * right_sum / static_cast<double>(nr));
        const double gain = node_sse - sse;
        if (gain > best.gain + 1e-15) {
          best.feature = f;
          best.threshold = 0.5 * (xl + xr);
          best.gain = gain;
        }
      }
    }
    return best;
  }

  const Matrix& X_;
  std::span<const double> y_;
  const LearnerSpec& spec_;
  int mtry_;
  Rng* rng_;
};

}  // namespace

struct Predictor::Impl {
  LearnerKind kind = LearnerKind::RegressionTree;
  std::size_t p = 0;
  TaskKind task = TaskKind::Regression;
  std::vector<Tree> trees;       // tree (1) or forest (n_trees)
  Matrix knn_x;                  // k-nearest training features
  std::vector<double> knn_y;
  int knn_k = 0;
  std::vector<double> beta;      // linear: p coefficients + intercept at the end
};

std::string to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::RegressionTree: return "regression-tree";
    case LearnerKind::RandomForest: return "random-forest";
    case LearnerKind::KNearest: return "k-nearest";
    case LearnerKind::LinearLeastSquares: return "linear-least-squares";
  }
  throw std::logic_error("to_string(LearnerKind)");
}

LearnerKind learner_kind_from_string(const std::string& s) {
  if (s == "regression-tree") return LearnerKind::RegressionTree;
  if (s == "random-forest") return LearnerKind::RandomForest;
  if (s == "k-nearest") return LearnerKind::KNearest;
  if (s == "linear-least-squares") return LearnerKind::LinearLeastSquares;
  throw std::invalid_argument("unknown learner kind: " + s);
}

Predictor fit(const LearnerSpec& spec, const Dataset& data) {
  const std::size_t n = data.n();
  const std::size_t p = data.p();
  if (spec.min_leaf < 1 || spec.n_trees < 1 || spec.k < 1)
    throw std::invalid_argument("fit: hyperparameters must be positive");

  auto impl = std::make_shared<Predictor::Impl>();
  impl->kind = spec.kind;
  impl->p = p;
  impl->task = data.task;

  switch (spec.kind) {
    case LearnerKind::RegressionTree: {
      std::vector<int> rows(n);
      std::iota(rows.begin(), rows.end(), 0);
      int mtry = spec.feature_subsample > 0 ? spec.feature_subsample : 0;
      Rng rng(derive_seed(spec.seed, "tree", 0));
      TreeBuilder builder(data.features, data.target, spec, mtry,
                          mtry > 0 ? &rng : nullptr);
      impl->trees.push_back(builder.build(std::move(rows)));
      break;
    }
    case LearnerKind::RandomForest: {
      // default to bagging over all features; per-split subsampling is
      // opt-in via feature_subsample
      int mtry = spec.feature_subsample > 0 ? spec.feature_subsample
                                            : static_cast<int>(p);
      impl->trees.resize(static_cast<std::size_t>(spec.n_trees));
      for (int t = 0; t < spec.n_trees; ++t) {
        Rng rng(derive_seed(spec.seed, "tree", static_cast<std::uint64_t>(t)));
        std::vector<int> rows(n);
        for (std::size_t i = 0; i < n; ++i)
          rows[i] = static_cast<int>(rng.index(n));
        TreeBuilder builder(data.features, data.target, spec, mtry, &rng);
        impl->trees[static_cast<std::size_t>(t)] = builder.build(std::move(rows));
      }
      break;
    }
    case LearnerKind::KNearest: {
      if (static_cast<std::size_t>(spec.k) > n)
        throw std::invalid_argument("fit: k-nearest requires k <= n");
      impl->knn_x = data.features;
      impl->knn_y = data.target;
      impl->knn_k = spec.k;
      break;
    }
    case LearnerKind::LinearLeastSquares: {
      if (n < p + 1)
        throw std::invalid_argument("fit: linear learner requires n >= p+1");
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                     Eigen::RowMajor>>
          X(data.features.data(), static_cast<Eigen::Index>(n),
            static_cast<Eigen::Index>(p));
      Eigen::Map<const Eigen::VectorXd> y(data.target.data(),
                                          static_cast<Eigen::Index>(n));
      Eigen::MatrixXd A(n, p + 1);
      A.leftCols(static_cast<Eigen::Index>(p)) = X;
      A.col(static_cast<Eigen::Index>(p)).setOnes();
      Eigen::MatrixXd gram = A.transpose() * A;
      // Tiny ridge on the normal equations instead of failing on rank
      // deficiency.
      gram.diagonal().array() += 1e-10;
      Eigen::VectorXd sol = gram.ldlt().solve(A.transpose() * y);
      impl->beta.assign(sol.data(), sol.data() + sol.size());
      break;
    }
  }
  return Predictor(std::move(impl));
}

double Predictor::predict(std::span<const double> x) const {
  if (!impl_) throw std::logic_error("Predictor: not fitted");
  const Impl& m = *impl_;
  if (x.size() != m.p)
    throw std::invalid_argument("Predictor::predict: dimension mismatch");
  switch (m.kind) {
    case LearnerKind::RegressionTree:
      return m.trees[0].predict(x);
    case LearnerKind::RandomForest: {
      double acc = 0.0;
      for (const Tree& t : m.trees) acc += t.predict(x);
      return acc / static_cast<double>(m.trees.size());
    }
    case LearnerKind::KNearest: {
      const std::size_t n = m.knn_x.rows();
      std::vector<std::pair<double, int>> d(n);
      for (std::size_t i = 0; i < n; ++i) {
        auto row = m.knn_x.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < m.p; ++j) {
          double diff = row[j] - x[j];
          acc += diff * diff;
        }
        d[i] = {acc, static_cast<int>(i)};
      }
      const std::size_t k = static_cast<std::size_t>(m.knn_k);
      std::partial_sort(d.begin(), d.begin() + static_cast<long>(k), d.end());
      double acc = 0.0;
      for (std::size_t i = 0; i < k; ++i)
        acc += m.knn_y[static_cast<std::size_t>(d[i].second)];
      return acc / static_cast<double>(k);
    }
    case LearnerKind::LinearLeastSquares: {
      double acc = m.beta[m.p];
      for (std::size_t j = 0; j < m.p; ++j) acc += m.beta[j] * x[j];
      return acc;
    }
  }
  throw std::logic_error("Predictor::predict: unknown kind");
}

double Predictor::predict_label(std::span<const double> x) const {
  double v = predict(x);
  if (impl_->task == TaskKind::BinaryClassification) return v >= 0.5 ? 1.0 : 0.0;
  return v;
}

std::size_t Predictor::input_dim() const { return impl_ ? impl_->p : 0; }
TaskKind Predictor::task() const { return impl_->task; }
LearnerKind Predictor::kind() const { return impl_->kind; }

std::string Predictor::to_json() const {
  if (!impl_) throw std::logic_error("Predictor: not fitted");
  const Impl& m = *impl_;
  nlohmann::json j;
  j["kind"] = to_string(m.kind);
  j["p"] = m.p;
  j["task"] = m.task == TaskKind::Regression ? "regression" : "binary-classification";
  if (m.kind == LearnerKind::RegressionTree || m.kind == LearnerKind::RandomForest) {
    nlohmann::json trees = nlohmann::json::array();
    for (const Tree& t : m.trees) {
      nlohmann::json nodes = nlohmann::json::array();
      for (const TreeNode& n : t.nodes)
        nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
      trees.push_back(std::move(nodes));
    }
    j["trees"] = std::move(trees);
  } else if (m.kind == LearnerKind::KNearest) {
    j["k"] = m.knn_k;
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.knn_x.rows(); ++i) {
      auto r = m.knn_x.row(i);
      rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    j["x"] = std::move(rows);
    j["y"] = m.knn_y;
  } else {
    j["beta"] = m.beta;
  }
  return j.dump();
}

Predictor Predictor::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  auto impl = std::make_shared<Impl>();
  impl->kind = learner_kind_from_string(j.at("kind").get<std::string>());
  impl->p = j.at("p").get<std::size_t>();
  impl->task = j.at("task").get<std::string>() == "regression"
                   ? TaskKind::Regression
                   : TaskKind::BinaryClassification;
  if (impl->kind == LearnerKind::RegressionTree ||
      impl->kind == LearnerKind::RandomForest) {
    for (const auto& jt : j.at("trees")) {
      Tree t;
      for (const auto& jn : jt) {
        TreeNode n;
        n.feature = jn[0].get<int>();
        n.threshold = jn[1].get<double>();
        n.left = jn[2].get<int>();
        n.right = jn[3].get<int>();
        n.value = jn[4].get<double>();
        t.nodes.push_back(n);
      }
      impl->trees.push_back(std::move(t));
    }
  } else if (impl->kind == LearnerKind::KNearest) {
    impl->knn_k = j.at("k").get<int>();
    const auto& rows = j.at("x");
    impl->knn_x = Matrix(rows.size(), impl->p);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t c = 0; c < impl->p; ++c)
        impl->knn_x(i, c) = rows[i][c].get<double>();
    impl->knn_y = j.at("y").get<std::vector<double>>();
  } else {
    impl->beta = j.at("beta").get<std::vector<double>>();
  }
  return Predictor(std::move(impl));
}

}  // namespace rloco
