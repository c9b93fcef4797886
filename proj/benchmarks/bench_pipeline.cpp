#include <benchmark/benchmark.h>

#include "shrinkbench/bench.hpp"
#include "shrinkbench/regression.hpp"
#include "shrinkbench/selectors.hpp"
#include "shrinkbench/synthetic.hpp"

using namespace shrinkbench;

namespace {

AlignedDataset desk_dataset(std::size_t n_rows, std::size_t n_tickers) {
  SyntheticSpec spec;
  spec.n_rows = n_rows;
  spec.n_tickers = n_tickers;
  spec.planted_count = 3;
  spec.noise_sigma = 0.05;
  spec.seed = 7;
  const SyntheticData data = generate_synthetic(spec);
  return build_horizon_target(align(data.series), data.target_id, 10);
}

void BM_KfoldCv(benchmark::State& state) {
  const AlignedDataset ds = desk_dataset(600, 4);
  const std::vector<std::string> subset = {"AAPL.Close", "SYN001.Open", "SYN002.High"};
  for (auto _ : state) {
    benchmark::DoNotOptimize(kfold_cv(ds, subset, 10, 3).mean_r2);
  }
}
BENCHMARK(BM_KfoldCv);

void BM_Selector(benchmark::State& state) {
  const AlignedDataset ds = desk_dataset(600, 24);
  SelectorSpec spec;
  spec.method_id = static_cast<MethodId>(state.range(0));
  spec.k = 10;
  spec.seed = 7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(select(ds, spec).selected.size());
  }
}
BENCHMARK(BM_Selector)
    ->Arg(static_cast<int>(MethodId::Var))
    ->Arg(static_cast<int>(MethodId::Cor))
    ->Arg(static_cast<int>(MethodId::Forward))
    ->Arg(static_cast<int>(MethodId::Backward))
    ->Arg(static_cast<int>(MethodId::Rfe))
    ->Arg(static_cast<int>(MethodId::Simulated))
    ->Arg(static_cast<int>(MethodId::Lasso))
    ->Arg(static_cast<int>(MethodId::TreeBase))
    ->Arg(static_cast<int>(MethodId::Dtw))
    ->Unit(benchmark::kMillisecond);

void BM_DeskBenchmarkCell(benchmark::State& state) {
  const AlignedDataset ds = desk_dataset(600, 24);
  const AlignedDataset shrunk = shrink(ds, 0.5);
  SelectorSpec spec;
  spec.method_id = MethodId::Backward;
  spec.k = 10;
  spec.seed = 7;
  for (auto _ : state) {
    const SelectionResult sel = select(shrunk, spec);
    benchmark::DoNotOptimize(kfold_cv(shrunk, sel.selected, 10, 11).mean_r2);
  }
  state.SetLabel("backward wrapper at 50% data");
}
BENCHMARK(BM_DeskBenchmarkCell)->Unit(benchmark::kMillisecond);

}  // namespace
