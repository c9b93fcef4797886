#include <benchmark/benchmark.h>

#include <vector>

#include "shrinkbench/metrics.hpp"
#include "shrinkbench/rng.hpp"

using namespace shrinkbench;

namespace {

std::vector<double> series(std::uint64_t seed, std::size_t n) {
  SplitMix64 rng(seed);
  std::vector<double> v;
  v.reserve(n);
  for (std::size_t i = 0; i < n; ++i) v.push_back(rng.next_gaussian());
  return v;
}

void BM_Euclidean(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = series(1, n);
  const auto b = series(2, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(euclidean(a, b));
  }
}
BENCHMARK(BM_Euclidean)->Arg(128)->Arg(512);

void BM_Dtw(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = series(1, n);
  const auto b = series(2, n);
  const MetricParams p{};
  for (auto _ : state) {
    benchmark::DoNotOptimize(dtw(a, b, p));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Dtw)->Arg(128)->Arg(256)->Arg(512)->Complexity(benchmark::oNSquared);

void BM_DtwBanded(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = series(1, n);
  const auto b = series(2, n);
  MetricParams p;
  p.dtw_band = 16;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dtw(a, b, p));
  }
}
BENCHMARK(BM_DtwBanded)->Arg(256)->Arg(512);

void BM_FrechetDiscrete(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = series(1, n);
  const auto b = series(2, n);
  const MetricParams p{};
  for (auto _ : state) {
    benchmark::DoNotOptimize(frechet_discrete(a, b, p));
  }
}
BENCHMARK(BM_FrechetDiscrete)->Arg(128)->Arg(512);

void BM_Hausdorff(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = series(1, n);
  const auto b = series(2, n);
  const MetricParams p{};
  for (auto _ : state) {
    benchmark::DoNotOptimize(hausdorff(a, b, p));
  }
}
BENCHMARK(BM_Hausdorff)->Arg(128)->Arg(512);

void BM_Sspd(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = series(1, n);
  const auto b = series(2, n);
  const MetricParams p{};
  for (auto _ : state) {
    benchmark::DoNotOptimize(sspd(a, b, p));
  }
}
BENCHMARK(BM_Sspd)->Arg(128)->Arg(512);

void BM_Edr(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = series(1, n);
  const auto b = series(2, n);
  const MetricParams p{};
  for (auto _ : state) {
    benchmark::DoNotOptimize(edr(a, b, p));
  }
}
BENCHMARK(BM_Edr)->Arg(128)->Arg(512);

}  // namespace
