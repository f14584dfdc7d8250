#include "rloco/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rloco {

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile: empty sample");
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile: q in [0,1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

RankingMetrics ranking_metrics(std::span<const AttributionVector> attributions,
                               const std::vector<std::vector<int>>& truth_sets,
                               int k, const std::vector<int>& excluded,
                               RankingConvention convention) {
  if (attributions.empty())
    throw std::invalid_argument("ranking_metrics: no attributions");
  if (attributions.size() != truth_sets.size())
    throw std::invalid_argument("ranking_metrics: truth sets misaligned");

  const std::size_t p = attributions[0].scores.size();
  std::vector<bool> is_excluded(p, false);
  for (int j : excluded) {
    if (j < 0 || static_cast<std::size_t>(j) >= p)
      throw std::invalid_argument("ranking_metrics: excluded index out of range");
    is_excluded[static_cast<std::size_t>(j)] = true;
  }
  const std::size_t available = p - static_cast<std::size_t>(std::count(
                                        is_excluded.begin(), is_excluded.end(), true));
  if (k <= 0 || static_cast<std::size_t>(k) > available)
    throw std::invalid_argument("ranking_metrics: k exceeds available features");

  double tp_sum = 0.0;
  std::vector<double> ni_values;
  std::vector<int> candidates;
  candidates.reserve(available);

  for (std::size_t row = 0; row < attributions.size(); ++row) {
    const auto& attr = attributions[row];
    if (attr.scores.size() != p)
      throw std::invalid_argument("ranking_metrics: inconsistent score length");
    const auto& truth = truth_sets[row];
    if (truth.size() != static_cast<std::size_t>(k))
      throw std::invalid_argument("ranking_metrics: |truth| must equal k");

    const NormalizedAttribution norm = normalize(attr);

    candidates.clear();
    for (std::size_t j = 0; j < p; ++j)
      if (!is_excluded[j]) candidates.push_back(static_cast<int>(j));

    // Sort key: normalized magnitude or raw signed score; lowest index wins
    // ties either way.
    auto key = [&](int j) {
      return convention == RankingConvention::Magnitude
                 ? norm.values[static_cast<std::size_t>(j)]
                 : attr.scores[static_cast<std::size_t>(j)];
    };
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](int a, int b) {
                       double ka = key(a), kb = key(b);
                       if (ka != kb) return ka > kb;
                       return a < b;
                     });

    std::vector<bool> in_truth(p, false);
    for (int j : truth) in_truth[static_cast<std::size_t>(j)] = true;

    int hits = 0;
    for (int i = 0; i < k; ++i)
      if (in_truth[static_cast<std::size_t>(candidates[static_cast<std::size_t>(i)])])
        ++hits;
    tp_sum += static_cast<double>(hits) / static_cast<double>(k);

    for (int j : candidates)
      if (!in_truth[static_cast<std::size_t>(j)])
        ni_values.push_back(norm.values[static_cast<std::size_t>(j)]);
  }

  RankingMetrics m;
  m.tp_rate = tp_sum / static_cast<double>(attributions.size());
  m.fp_rate = 1.0 - m.tp_rate;
  if (!ni_values.empty()) {
    m.ni_mean = std::accumulate(ni_values.begin(), ni_values.end(), 0.0) /
                static_cast<double>(ni_values.size());
    m.ni_q10 = quantile(ni_values, 0.10);
    m.ni_q95 = quantile(ni_values, 0.95);
  }
  return m;
}

}  // namespace rloco
