#include <benchmark/benchmark.h>

#include "rloco/learners.hpp"
#include "rloco/regions.hpp"
#include "rloco/rng.hpp"
#include "rloco/shapley.hpp"
#include "rloco/synthetic.hpp"

using namespace rloco;

namespace {

Matrix uniform_matrix(std::size_t n, std::size_t p, std::uint64_t seed) {
  Rng rng(seed);
  Matrix x(n, p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) x(i, j) = rng.uniform(-1.0, 1.0);
  return x;
}

void BM_ClosedFormLsv(benchmark::State& state) {
  const std::size_t p = static_cast<std::size_t>(state.range(0));
  PiecewiseLinearModel model = random_partition_model(p, 4, 7);
  Rng rng(1);
  std::vector<double> x(p);
  for (double& v : x) v = rng.uniform(-1.0, 1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(lsv_closed_form(model, x));
}
BENCHMARK(BM_ClosedFormLsv)->Arg(6)->Arg(10)->Arg(16);

void BM_EnumerationLsv(benchmark::State& state) {
  const std::size_t p = static_cast<std::size_t>(state.range(0));
  PiecewiseLinearModel model = random_partition_model(p, 4, 7);
  Rng rng(1);
  std::vector<double> x(p);
  for (double& v : x) v = rng.uniform(-1.0, 1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(lsv_enumeration(model, x));
}
BENCHMARK(BM_EnumerationLsv)->Arg(6)->Arg(10);

void BM_ForestFit(benchmark::State& state) {
  SyntheticSpec sp;
  sp.model = ModelId::FirstOrder;
  sp.p = 6;
  sp.n = static_cast<std::size_t>(state.range(0));
  sp.seed = 3;
  SyntheticData gen = generate(sp);
  LearnerSpec spec;
  spec.n_trees = 100;
  for (auto _ : state)
    benchmark::DoNotOptimize(fit(spec, gen.data));
}
BENCHMARK(BM_ForestFit)->Arg(500)->Arg(1500)->Unit(benchmark::kMillisecond);

void BM_AffinityPropagation(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  Matrix x = uniform_matrix(n, 6, 11);
  ClusterSpec spec;
  spec.algorithm = ClusterAlgorithm::AffinityPropagation;
  spec.damping = 0.8;
  for (auto _ : state)
    benchmark::DoNotOptimize(cluster(x, spec));
}
BENCHMARK(BM_AffinityPropagation)->Arg(200)->Arg(600)->Unit(benchmark::kMillisecond);

void BM_SumDistanceAssign(benchmark::State& state) {
  Matrix x = uniform_matrix(1500, 6, 13);
  ClusterSpec spec;
  spec.algorithm = ClusterAlgorithm::KMeans;
  spec.k = 4;
  RegionPartition part = cluster(x, spec);
  std::vector<double> probe = {0.1, -0.2, 0.3, 0.0, 0.5, -0.6};
  for (auto _ : state)
    benchmark::DoNotOptimize(assign(part, probe));
}
BENCHMARK(BM_SumDistanceAssign);

}  // namespace

BENCHMARK_MAIN();
