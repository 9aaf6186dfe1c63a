#include <benchmark/benchmark.h>

#include "heterotomo/gram.hpp"
#include "heterotomo/phantom.hpp"
#include "heterotomo/solve.hpp"

using namespace heterotomo;

namespace {

Dataset bench_dataset(int n) {
  DesignConfig d;
  d.n = n;
  return generate_dataset(PhantomModel::default_model(), d, 1);
}

}  // namespace

static void BM_InducedKernel(benchmark::State& state) {
  const GaussianKernel k(256.0);
  const Chord a(0.3, 0.1), b(1.9, -0.4);
  for (auto _ : state) benchmark::DoNotOptimize(induced_kernel(k, a, b));
}
BENCHMARK(BM_InducedKernel);

static void BM_FeatureEval(benchmark::State& state) {
  const GaussianKernel k(256.0);
  const Chord a(0.3, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(feature_eval(k, a, Point2(0.2, 0.05)));
}
BENCHMARK(BM_FeatureEval);

static void BM_AssembleGram(benchmark::State& state) {
  const Dataset data = bench_dataset(static_cast<int>(state.range(0)));
  const GaussianKernel k(256.0);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_gram(data, k));
  state.SetComplexityN(data.side());
}
BENCHMARK(BM_AssembleGram)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_CovOperator(benchmark::State& state) {
  const Dataset data = bench_dataset(static_cast<int>(state.range(0)));
  const BlockedGramMatrix g = assemble_gram(data, GaussianKernel(256.0));
  const BlockDiagonal a = apply_elimination(block_outer_observations(observation_vector(data), data), data);
  for (auto _ : state) benchmark::DoNotOptimize(apply_cov_operator(g, 1.0 / 256, a, data));
}
BENCHMARK(BM_CovOperator)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
