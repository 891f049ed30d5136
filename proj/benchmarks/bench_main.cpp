#include <benchmark/benchmark.h>

#include "wkl/fredholm.hpp"
#include "wkl/kernels.hpp"
#include "wkl/stochastic.hpp"

using namespace wkl;

static void BM_AiryKernelPoint(benchmark::State& st) {
  auto K = ExtendedKernel::airy();
  double x = 0.0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(K(0.0, x, 0.3, -x));
    x += 1e-3;
  }
}
BENCHMARK(BM_AiryKernelPoint);

static void BM_SlopedKernelBlock(benchmark::State& st) {
  auto K = ExtendedKernel::sloped(make_params({1.0, 0.5}), 0.5, 50.0);
  std::vector<double> xs(st.range(0));
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = -2.0 + 4.0 * i / xs.size();
  for (auto _ : st) benchmark::DoNotOptimize(K.block(1.0, xs, 1.0, xs));
  st.SetItemsProcessed(st.iterations() * xs.size() * xs.size());
}
BENCHMARK(BM_SlopedKernelBlock)->Arg(8)->Arg(32);

static void BM_Tw2(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(tw2_cdf(-1.0, static_cast<int>(st.range(0))));
}
BENCHMARK(BM_Tw2)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

static void BM_BbpTwoTime(benchmark::State& st) {
  auto K = ExtendedKernel::abc(make_params({1.0, 0.5}, {0.8}));
  for (auto _ : st) benchmark::DoNotOptimize(gap_probability(K, {{0.0, 0.5}, {0.0, 0.5}}));
}
BENCHMARK(BM_BbpTwoTime)->Unit(benchmark::kMillisecond);

static void BM_DbmEuler(benchmark::State& st) {
  DBMSpec spec;
  spec.n = static_cast<int>(st.range(0));
  spec.times = {1.0};
  std::uint64_t seed = 0;
  for (auto _ : st) {
    spec.seed = seed++;
    benchmark::DoNotOptimize(sample_dbm_euler(spec));
  }
}
BENCHMARK(BM_DbmEuler)->Arg(2)->Arg(8);

static void BM_DbmMatrix(benchmark::State& st) {
  std::uint64_t seed = 0;
  for (auto _ : st) benchmark::DoNotOptimize(sample_dbm_matrix(static_cast<int>(st.range(0)), {1.0}, seed++));
}
BENCHMARK(BM_DbmMatrix)->Arg(2)->Arg(8);

static void BM_BridgeRejection(benchmark::State& st) {
  BridgeBoundary b;
  b.x = {1.0, 0.0};
  b.y = {1.0, 0.0};
  b.points_per_unit = static_cast<int>(st.range(0));
  std::uint64_t seed = 0;
  for (auto _ : st) benchmark::DoNotOptimize(sample_avoiding_rejection(b, seed++));
}
BENCHMARK(BM_BridgeRejection)->Arg(64)->Arg(512);

static void BM_BridgeMcmc(benchmark::State& st) {
  BridgeBoundary b;
  b.x = {1.0, 0.0};
  b.y = {1.0, 0.0};
  b.points_per_unit = 64;
  std::uint64_t seed = 0;
  for (auto _ : st) benchmark::DoNotOptimize(sample_avoiding_mcmc(b, static_cast<int>(st.range(0)), seed++));
}
BENCHMARK(BM_BridgeMcmc)->Arg(10)->Arg(40);
BENCHMARK_MAIN();
