#include "rloco/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rloco/rng.hpp"

namespace rloco {

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double metric_dist(std::span<const double> a, std::span<const double> b,
                   DistanceMetric metric) {
  if (metric == DistanceMetric::Euclidean) return std::sqrt(sq_dist(a, b));
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return acc;
}

struct KMeansResult {
  std::vector<int> labels;
  Matrix centroids;
  double inertia = std::numeric_limits<double>::infinity();
};

KMeansResult kmeans_once(const Matrix& x, int k, std::uint64_t seed) {
  const std::size_t n = x.rows(), d = x.cols();
  Rng rng(seed);
  Matrix centroids(static_cast<std::size_t>(k), d);

  // k-means++ seeding
  std::vector<double> dist2(n, std::numeric_limits<double>::infinity());
  {
    std::size_t first = rng.index(n);
    auto r = x.row(first);
    std::copy(r.begin(), r.end(), centroids.row(0).begin());
  }
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double d2 = sq_dist(x.row(i), centroids.row(static_cast<std::size_t>(c - 1)));
      dist2[i] = std::min(dist2[i], d2);
      total += dist2[i];
    }
    std::size_t pick;
    if (total > 0.0) {
      double r = rng.u01() * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += dist2[i];
        if (acc >= r) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.index(n);
    }
    auto rr = x.row(pick);
    std::copy(rr.begin(), rr.end(), centroids.row(static_cast<std::size_t>(c)).begin());
  }

  std::vector<int> labels(n, -1);
  std::vector<std::size_t> counts(static_cast<std::size_t>(k));
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sq_dist(x.row(i), centroids.row(0));
      for (int c = 1; c < k; ++c) {
        double dd = sq_dist(x.row(i), centroids.row(static_cast<std::size_t>(c)));
        if (dd < best_d) {
          best_d = dd;
          best = c;
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }
    // recompute means
    Matrix sums(static_cast<std::size_t>(k), d);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto r = x.row(i);
      auto s = sums.row(static_cast<std::size_t>(labels[i]));
      for (std::size_t j = 0; j < d; ++j) s[j] += r[j];
      ++counts[static_cast<std::size_t>(labels[i])];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) {
        // move the point farthest from its centroid into the empty cluster
        double far_d = -1.0;
        std::size_t far_i = 0;
        for (std::size_t i = 0; i < n; ++i) {
          double dd = sq_dist(x.row(i),
                              centroids.row(static_cast<std::size_t>(labels[i])));
          if (dd > far_d) {
            far_d = dd;
            far_i = i;
          }
        }
        labels[far_i] = c;
        changed = true;
        std::fill(counts.begin(), counts.end(), 0);
        Matrix zero(static_cast<std::size_t>(k), d);
        sums = zero;
        for (std::size_t i = 0; i < n; ++i) {
          auto r = x.row(i);
          auto s = sums.row(static_cast<std::size_t>(labels[i]));
          for (std::size_t j = 0; j < d; ++j) s[j] += r[j];
          ++counts[static_cast<std::size_t>(labels[i])];
        }
      }
    }
    for (int c = 0; c < k; ++c) {
      auto ctr = centroids.row(static_cast<std::size_t>(c));
      auto s = sums.row(static_cast<std::size_t>(c));
      double cnt = static_cast<double>(counts[static_cast<std::size_t>(c)]);
      for (std::size_t j = 0; j < d; ++j) ctr[j] = s[j] / cnt;
    }
    if (!changed) break;
  }

  KMeansResult res;
  res.inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    res.inertia += sq_dist(x.row(i), centroids.row(static_cast<std::size_t>(labels[i])));
  res.labels = std::move(labels);
  res.centroids = std::move(centroids);
  return res;
}

KMeansResult kmeans(const Matrix& x, int k, std::uint64_t seed, int restarts = 10) {
  KMeansResult best;
  for (int r = 0; r < restarts; ++r) {
    KMeansResult cur = kmeans_once(x, k, derive_seed(seed, "kmeans-restart",
                                                     static_cast<std::uint64_t>(r)));
    if (cur.inertia < best.inertia) best = std::move(cur);
  }
  return best;
}

struct ApResult {
  std::vector<int> labels;        // cluster ids in sorted-exemplar order
  std::vector<int> exemplars;     // row index per cluster
  bool converged = false;
};

// Frey-Dueck message passing with damping; similarity is the negative squared
// Euclidean distance, preference the median similarity.
ApResult affinity_propagation(const Matrix& x, double damping, std::uint64_t seed,
                              int max_iter = 200, int stable_window = 15) {
  const std::size_t n = x.rows();
  std::vector<double> s(n * n), r(n * n, 0.0), a(n * n, 0.0);

  std::vector<double> off;
  off.reserve(n * (n - 1));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double v = -sq_dist(x.row(i), x.row(j));
      s[i * n + j] = v;
      off.push_back(v);
    }
  std::nth_element(off.begin(), off.begin() + static_cast<long>(off.size() / 2),
                   off.end());
  const double preference = off[off.size() / 2];
  for (std::size_t i = 0; i < n; ++i) s[i * n + i] = preference;

  // tiny seeded noise breaks exact similarity ties
  Rng rng(derive_seed(seed, "ap-noise"));
  for (double& v : s) v += 1e-12 * rng.u01();

  std::vector<char> is_exemplar(n, 0), prev_exemplar(n, 0);
  int stable = 0;
  bool converged = false;

  std::vector<double> as_row(n);
  for (int iter = 0; iter < max_iter; ++iter) {
    // responsibilities
    for (std::size_t i = 0; i < n; ++i) {
      double max1 = -std::numeric_limits<double>::infinity();
      double max2 = max1;
      std::size_t arg1 = 0;
      for (std::size_t k = 0; k < n; ++k) {
        double v = a[i * n + k] + s[i * n + k];
        as_row[k] = v;
        if (v > max1) {
          max2 = max1;
          max1 = v;
          arg1 = k;
        } else if (v > max2) {
          max2 = v;
        }
      }
      for (std::size_t k = 0; k < n; ++k) {
        double target = s[i * n + k] - (k == arg1 ? max2 : max1);
        r[i * n + k] = damping * r[i * n + k] + (1.0 - damping) * target;
      }
    }
    // availabilities
    for (std::size_t k = 0; k < n; ++k) {
      double sum_pos = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (i != k) sum_pos += std::max(0.0, r[i * n + k]);
      const double rkk = r[k * n + k];
      for (std::size_t i = 0; i < n; ++i) {
        double target;
        if (i == k)
          target = sum_pos;
        else
          target = std::min(0.0, rkk + sum_pos - std::max(0.0, r[i * n + k]));
        a[i * n + k] = damping * a[i * n + k] + (1.0 - damping) * target;
      }
    }
    // convergence on a stable nonempty exemplar set
    std::size_t count = 0;
    for (std::size_t k = 0; k < n; ++k) {
      is_exemplar[k] = (r[k * n + k] + a[k * n + k]) > 0.0 ? 1 : 0;
      count += static_cast<std::size_t>(is_exemplar[k]);
    }
    if (count > 0 && is_exemplar == prev_exemplar)
      ++stable;
    else
      stable = 0;
    prev_exemplar = is_exemplar;
    if (stable >= stable_window) {
      converged = true;
      break;
    }
  }

  ApResult res;
  res.converged = converged;
  for (std::size_t k = 0; k < n; ++k)
    if (is_exemplar[k]) res.exemplars.push_back(static_cast<int>(k));
  if (!converged || res.exemplars.empty()) return res;

  res.labels.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    int best = -1;
    double best_s = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < res.exemplars.size(); ++c) {
      std::size_t k = static_cast<std::size_t>(res.exemplars[c]);
      if (k == i) {
        best = static_cast<int>(c);
        break;
      }
      if (s[i * n + k] > best_s) {
        best_s = s[i * n + k];
        best = static_cast<int>(c);
      }
    }
    res.labels[i] = best;
  }
  return res;
}

// Greedy multi-output variance tree: repeatedly apply the split (over all
// leaves, coordinates and midpoint thresholds) with the largest reduction of
// the total within-node sum of squares.
struct VtNode {
  std::vector<int> rows;
  int feature = -1;
  double threshold = 0.0;
  int left = -1, right = -1;
  int leaf_id = -1;
};

struct VtSplit {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

double node_sse(const Matrix& x, const std::vector<int>& rows) {
  const std::size_t d = x.cols();
  double sse = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double sum = 0.0, sum2 = 0.0;
    for (int rr : rows) {
      double v = x(static_cast<std::size_t>(rr), j);
      sum += v;
      sum2 += v * v;
    }
    sse += sum2 - sum * sum / static_cast<double>(rows.size());
  }
  return sse;
}

VtSplit best_variance_split(const Matrix& x, const std::vector<int>& rows,
                            int min_leaf) {
  const std::size_t d = x.cols();
  VtSplit best;
  if (rows.size() < 2 * static_cast<std::size_t>(min_leaf)) return best;
  const double parent = node_sse(x, rows);
  std::vector<int> order;
  std::vector<double> lsum(d), lsum2(d), tsum(d), tsum2(d);
  for (std::size_t f = 0; f < d; ++f) {
    order = rows;
    std::sort(order.begin(), order.end(), [&](int p, int q) {
      double a = x(static_cast<std::size_t>(p), f);
      double b = x(static_cast<std::size_t>(q), f);
      if (a != b) return a < b;
      return p < q;
    });
    std::fill(lsum.begin(), lsum.end(), 0.0);
    std::fill(lsum2.begin(), lsum2.end(), 0.0);
    std::fill(tsum.begin(), tsum.end(), 0.0);
    std::fill(tsum2.begin(), tsum2.end(), 0.0);
    for (int rr : rows)
      for (std::size_t j = 0; j < d; ++j) {
        double v = x(static_cast<std::size_t>(rr), j);
        tsum[j] += v;
        tsum2[j] += v * v;
      }
    const std::size_t n = order.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        double v = x(static_cast<std::size_t>(order[i]), j);
        lsum[j] += v;
        lsum2[j] += v * v;
      }
      double xl = x(static_cast<std::size_t>(order[i]), f);
      double xr = x(static_cast<std::size_t>(order[i + 1]), f);
      if (xl == xr) continue;
      std::size_t nl = i + 1, nr = n - nl;
      if (nl < static_cast<std::size_t>(min_leaf) ||
          nr < static_cast<std::size_t>(min_leaf))
        continue;
      double sse = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        double rs = tsum[j] - lsum[j];
        double rs2 = tsum2[j] - lsum2[j];
        sse += (lsum2[j] - lsum[j] * lsum[j] / static_cast<double>(nl)) +
               (rs2 - rs * rs / static_cast<double>(nr));
      }
      double gain = parent - sse;
      if (gain > best.gain + 1e-15) {
        best.gain = gain;
        best.feature = static_cast<int>(f);
        best.threshold = 0.5 * (xl + xr);
      }
    }
  }
  return best;
}

void render_tree(const std::vector<VtNode>& nodes, int id, int depth,
                 std::ostringstream& os) {
  const VtNode& n = nodes[static_cast<std::size_t>(id)];
  auto indent = [&](int d) {
    for (int i = 0; i < d; ++i) os << "|   ";
  };
  if (n.feature < 0) {
    indent(depth);
    os << "|--- cluster: " << n.leaf_id << "\n";
    return;
  }
  indent(depth);
  os << "|--- f" << (n.feature + 1) << " <= " << n.threshold << "\n";
  render_tree(nodes, n.left, depth + 1, os);
  indent(depth);
  os << "|--- f" << (n.feature + 1) << " >  " << n.threshold << "\n";
  render_tree(nodes, n.right, depth + 1, os);
}

}  // namespace

std::string to_string(ClusterAlgorithm a) {
  switch (a) {
    case ClusterAlgorithm::KMeans: return "kmeans";
    case ClusterAlgorithm::AffinityPropagation: return "affinity-propagation";
    case ClusterAlgorithm::VarianceTree: return "variance-tree";
    case ClusterAlgorithm::OracleRegions: return "oracle-regions";
  }
  throw std::logic_error("to_string(ClusterAlgorithm)");
}

std::string to_string(ClusterSpace s) {
  switch (s) {
    case ClusterSpace::Importance: return "importance";
    case ClusterSpace::Input: return "input";
    case ClusterSpace::EnrichedImportance: return "enriched-importance";
  }
  throw std::logic_error("to_string(ClusterSpace)");
}

RegionPartition cluster(const Matrix& repr, const ClusterSpec& spec) {
  const std::size_t n = repr.rows();
  if (n == 0) throw std::invalid_argument("cluster: empty representation");

  RegionPartition part;
  part.clustering_space = repr;
  part.metric = spec.metric;
  part.assignment = spec.assignment;
  part.algorithm = spec.algorithm;

  switch (spec.algorithm) {
    case ClusterAlgorithm::KMeans: {
      if (spec.k < 1 || static_cast<std::size_t>(spec.k) > n)
        throw std::invalid_argument("cluster: kmeans requires 1 <= K <= n");
      KMeansResult res = kmeans(repr, spec.k, spec.seed);
      part.assignments = std::move(res.labels);
      break;
    }
    case ClusterAlgorithm::AffinityPropagation: {
      if (spec.damping < 0.5 || spec.damping >= 1.0)
        throw std::invalid_argument("cluster: damping must lie in [0.5, 1)");
      ApResult res = affinity_propagation(repr, spec.damping, spec.seed);
      if (res.converged) {
        part.assignments = std::move(res.labels);
      } else {
        int k = std::max<std::size_t>(1, res.exemplars.size());
        part.ap_fallback = true;
        part.warnings.push_back(
            "affinity propagation did not converge; fell back to kmeans with K=" +
            std::to_string(k));
        KMeansResult km = kmeans(repr, k, spec.seed);
        part.assignments = std::move(km.labels);
      }
      break;
    }
    case ClusterAlgorithm::VarianceTree: {
      std::vector<VtNode> nodes;
      nodes.emplace_back();
      nodes[0].rows.resize(n);
      std::iota(nodes[0].rows.begin(), nodes[0].rows.end(), 0);
      std::vector<int> leaves = {0};
      while (static_cast<int>(leaves.size()) < spec.max_leaves) {
        double best_gain = 0.0;
        int best_leaf = -1;
        VtSplit best_split;
        for (int leaf : leaves) {
          VtSplit sp = best_variance_split(repr, nodes[static_cast<std::size_t>(leaf)].rows,
                                           spec.min_leaf);
          if (sp.feature >= 0 && sp.gain > best_gain + 1e-15) {
            best_gain = sp.gain;
            best_leaf = leaf;
            best_split = sp;
          }
        }
        if (best_leaf < 0) break;
        VtNode& parent = nodes[static_cast<std::size_t>(best_leaf)];
        VtNode left, right;
        for (int rr : parent.rows) {
          if (repr(static_cast<std::size_t>(rr),
                   static_cast<std::size_t>(best_split.feature)) <=
              best_split.threshold)
            left.rows.push_back(rr);
          else
            right.rows.push_back(rr);
        }
        parent.feature = best_split.feature;
        parent.threshold = best_split.threshold;
        parent.rows.clear();
        int li = static_cast<int>(nodes.size());
        nodes.push_back(std::move(left));
        int ri = static_cast<int>(nodes.size());
        nodes.push_back(std::move(right));
        nodes[static_cast<std::size_t>(best_leaf)].left = li;
        nodes[static_cast<std::size_t>(best_leaf)].right = ri;
        leaves.erase(std::find(leaves.begin(), leaves.end(), best_leaf));
        leaves.push_back(li);
        leaves.push_back(ri);
      }
      std::sort(leaves.begin(), leaves.end());
      part.assignments.assign(n, -1);
      for (std::size_t c = 0; c < leaves.size(); ++c) {
        VtNode& leaf = nodes[static_cast<std::size_t>(leaves[c])];
        leaf.leaf_id = static_cast<int>(c);
        for (int rr : leaf.rows)
          part.assignments[static_cast<std::size_t>(rr)] = static_cast<int>(c);
      }
      std::ostringstream os;
      os.precision(6);
      render_tree(nodes, 0, 0, os);
      part.tree_rules = os.str();
      break;
    }
    case ClusterAlgorithm::OracleRegions: {
      if (spec.oracle_labels.size() != n)
        throw std::invalid_argument("cluster: oracle labels misaligned");
      part.assignments = spec.oracle_labels;
      break;
    }
  }

  int k = 0;
  for (int label : part.assignments) {
    if (label < 0) throw std::logic_error("cluster: unlabeled row");
    k = std::max(k, label + 1);
  }
  part.members.assign(static_cast<std::size_t>(k), {});
  for (std::size_t i = 0; i < n; ++i)
    part.members[static_cast<std::size_t>(part.assignments[i])].push_back(
        static_cast<int>(i));

  // drop empty clusters (possible with oracle labels), renumbering
  std::vector<std::vector<int>> kept;
  std::vector<int> remap(static_cast<std::size_t>(k), -1);
  for (int c = 0; c < k; ++c) {
    if (part.members[static_cast<std::size_t>(c)].empty()) {
      part.warnings.push_back("dropped empty cluster " + std::to_string(c));
      continue;
    }
    remap[static_cast<std::size_t>(c)] = static_cast<int>(kept.size());
    kept.push_back(std::move(part.members[static_cast<std::size_t>(c)]));
  }
  part.members = std::move(kept);
  for (int& label : part.assignments) label = remap[static_cast<std::size_t>(label)];

  part.centroids.assign(part.members.size(),
                        std::vector<double>(repr.cols(), 0.0));
  for (std::size_t c = 0; c < part.members.size(); ++c) {
    for (int rr : part.members[c]) {
      auto row = repr.row(static_cast<std::size_t>(rr));
      for (std::size_t j = 0; j < repr.cols(); ++j) part.centroids[c][j] += row[j];
    }
    for (double& v : part.centroids[c])
      v /= static_cast<double>(part.members[c].size());
  }
  return part;
}

void fill_regional_attributions(RegionPartition& partition,
                                const ImportanceRepresentation& repr) {
  const std::size_t n = repr.deltas.rows();
  const std::size_t p = repr.deltas.cols();
  if (partition.assignments.size() != n)
    throw std::invalid_argument("fill_regional_attributions: row mismatch");

  partition.regional_attributions = Matrix(partition.k(), p);
  for (std::size_t c = 0; c < partition.k(); ++c) {
    auto out = partition.regional_attributions.row(c);
    for (int rr : partition.members[c]) {
      auto row = repr.deltas.row(static_cast<std::size_t>(rr));
      for (std::size_t j = 0; j < p; ++j) out[j] += row[j];
    }
    for (std::size_t j = 0; j < p; ++j)
      out[j] /= static_cast<double>(partition.members[c].size());
  }
}

Assignment assign(const RegionPartition& partition, std::span<const double> x_repr) {
  if (partition.k() == 0) throw std::invalid_argument("assign: empty partition");
  if (x_repr.size() != partition.clustering_space.cols())
    throw std::invalid_argument("assign: representation dimension mismatch");

  std::vector<double> score(partition.k(), 0.0);
  if (partition.assignment == AssignmentRule::SumOfDistances) {
    for (std::size_t c = 0; c < partition.k(); ++c) {
      double acc = 0.0;
      for (int rr : partition.members[c])
        acc += metric_dist(x_repr,
                           partition.clustering_space.row(static_cast<std::size_t>(rr)),
                           partition.metric);
      score[c] = acc;
    }
  } else {
    for (std::size_t c = 0; c < partition.k(); ++c)
      score[c] = metric_dist(x_repr, partition.centroids[c], partition.metric);
  }

  Assignment out;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < partition.k(); ++c) best = std::min(best, score[c]);
  for (std::size_t c = 0; c < partition.k(); ++c)
    if (score[c] == best) out.tied.push_back(static_cast<int>(c));
  out.label = out.tied.front();
  out.undecidable = out.tied.size() > 1;
  return out;
}

RlocoPipeline fit_rloco(const Dataset& fit_data, const Dataset& calibration_data,
                        const LearnerSpec& learner, const ClusterSpec& cspec,
                        int threads) {
  RlocoPipeline pipe;
  pipe.models = fit_loco(fit_data, learner, threads);
  pipe.score = fit_data.task == TaskKind::BinaryClassification
                   ? ConformityScore{ConformityKind::Accuracy, 1.0}
                   : ConformityScore{ConformityKind::RSquared, pipe.models.sigma2_fit};
  pipe.cluster_spec = cspec;

  const bool enriched = cspec.space == ClusterSpace::EnrichedImportance;
  pipe.calibration_repr = delta_scores(pipe.models, calibration_data, pipe.score,
                                       enriched);

  Matrix space;
  switch (cspec.space) {
    case ClusterSpace::Importance:
      space = pipe.calibration_repr.deltas;
      break;
    case ClusterSpace::Input:
      space = calibration_data.features;
      break;
    case ClusterSpace::EnrichedImportance:
      space = pipe.calibration_repr.concatenated();
      break;
  }
  pipe.partition = cluster(space, cspec);
  fill_regional_attributions(pipe.partition, pipe.calibration_repr);
  return pipe;
}

RlocoExplanation explain_rloco(const RlocoPipeline& pipeline,
                               std::span<const double> x, std::optional<double> y) {
  PointImportance pi = point_importance(pipeline.models, x, y, pipeline.score);

  std::vector<double> repr;
  switch (pipeline.cluster_spec.space) {
    case ClusterSpace::Importance:
      repr = pi.deltas;
      break;
    case ClusterSpace::Input:
      repr.assign(x.begin(), x.end());
      break;
    case ClusterSpace::EnrichedImportance:
      repr = pi.deltas;
      repr.insert(repr.end(), pi.signed_residuals.begin(),
                  pi.signed_residuals.end());
      break;
  }

  Assignment a = assign(pipeline.partition, repr);
  RlocoExplanation out;
  out.cluster = a.label;  // ties resolve to the lowest index
  out.undecidable = a.undecidable;
  out.mode = pi.mode;
  auto row = pipeline.partition.regional_attributions.row(
      static_cast<std::size_t>(a.label));
  out.attribution.scores.assign(row.begin(), row.end());
  out.attribution.method = "rloco";
  return out;
}

std::string RegionPartition::to_json(
    const std::vector<std::string>& feature_names) const {
  nlohmann::json j;
  j["algorithm"] = rloco::to_string(algorithm);
  j["metric"] = metric == DistanceMetric::Euclidean ? "euclidean" : "manhattan";
  j["assignment"] =
      assignment == AssignmentRule::SumOfDistances ? "sum-of-distances" : "centroid";
  j["k"] = k();
  j["assignments"] = assignments;
  j["members"] = members;
  j["feature_names"] = feature_names;
  nlohmann::json attr = nlohmann::json::array();
  for (std::size_t c = 0; c < regional_attributions.rows(); ++c) {
    auto row = regional_attributions.row(c);
    attr.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["regional_attributions"] = std::move(attr);
  j["ap_fallback"] = ap_fallback;
  j["warnings"] = warnings;
  if (!tree_rules.empty()) j["tree_rules"] = tree_rules;
  return j.dump(2);
}

}  // namespace rloco
