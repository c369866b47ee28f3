#include <benchmark/benchmark.h>

#include <map>

#include "cliquewatch/baselines.hpp"
#include "cliquewatch/regression.hpp"
#include "cliquewatch/scoring.hpp"
#include "cliquewatch/simulator.hpp"

namespace cw = cliquewatch;

namespace {

// E1 layout, shortened to `timestamps` windows.
const cw::LabeledStream& e1(std::size_t timestamps) {
  static std::map<std::size_t, cw::LabeledStream> cache;
  auto it = cache.find(timestamps);
  if (it == cache.end()) {
    auto c = cw::preset(cw::Preset::E1);
    c.anomaly.reset();
    c.timestamps = timestamps;
    c.train_windows = timestamps / 2;
    c.seed = 1;
    it = cache.emplace(timestamps, cw::generate(c)).first;
  }
  return it->second;
}

void BM_Simulate(benchmark::State& state) {
  auto c = cw::preset(cw::Preset::E1);
  c.timestamps = static_cast<std::size_t>(state.range(0));
  c.train_windows = c.timestamps / 2;
  c.anomaly.reset();
  for (auto _ : state) benchmark::DoNotOptimize(cw::generate(c));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 100);
}
BENCHMARK(BM_Simulate)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_FitTree(benchmark::State& state) {
  const auto& data = e1(static_cast<std::size_t>(state.range(0)));
  cw::RegressorConfig c;
  c.method = cw::RegressionMethod::tree;
  for (auto _ : state) benchmark::DoNotOptimize(cw::fit_node(data.stream(), 0, c));
  state.SetItemsProcessed(state.iterations() * data.stream().size());
}
BENCHMARK(BM_FitTree)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_FitForest(benchmark::State& state) {
  const auto& data = e1(200);
  cw::RegressorConfig c;
  c.forest_size = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cw::fit_node(data.stream(), 0, c));
}
BENCHMARK(BM_FitForest)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_PredictEvents(benchmark::State& state) {
  const auto& data = e1(200);
  cw::RegressorConfig c;
  c.forest_size = static_cast<std::size_t>(state.range(0));
  const auto model = cw::fit_node(data.stream(), 0, c);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict_events(data.stream().events()));
  state.SetItemsProcessed(state.iterations() * data.stream().size());
}
BENCHMARK(BM_PredictEvents)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_KernelPredict(benchmark::State& state) {
  const auto& data = e1(20);
  cw::RegressorConfig c;
  c.method = cw::RegressionMethod::kernel;
  const auto model = cw::fit_node(data.stream(), 0, c);
  const auto events = data.stream().events().first(100);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict_events(events));
  state.SetItemsProcessed(state.iterations() * events.size());
}
BENCHMARK(BM_KernelPredict)->Unit(benchmark::kMillisecond);

void BM_InvertBound(benchmark::State& state) {
  const auto mode = static_cast<cw::BoundMode>(state.range(0));
  std::size_t n = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cw::invert_bound(mode, n, 0.01));
    n = n % 1000 + 1;
  }
}
BENCHMARK(BM_InvertBound)->Arg(0)->Arg(1)->Arg(2);

void BM_PoissonPValue(benchmark::State& state) {
  const double rate = static_cast<double>(state.range(0));
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cw::poisson_two_sided_pvalue(k, rate));
    k = (k + 7) % (2 * static_cast<std::size_t>(rate) + 1);
  }
}
BENCHMARK(BM_PoissonPValue)->Arg(10)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
