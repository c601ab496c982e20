#include <benchmark/benchmark.h>

#include "essk/estimators.hpp"
#include "essk/mcmc.hpp"
#include "essk/rng.hpp"
#include "essk/scenario.hpp"
#include "essk/spline.hpp"

namespace {

using namespace essk;

const Scenario& scenario(int index) { return builtin_scenarios()[static_cast<std::size_t>(index)]; }

void BM_SimulateDraws(benchmark::State& state) {
  const Scenario& s = scenario(static_cast<int>(state.range(0)));
  DrawOptions opts;
  opts.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_draws(s, 10000, 1, opts));
  state.SetLabel(s.name);
}
BENCHMARK(BM_SimulateDraws)->DenseRange(0, 6)->Unit(benchmark::kMillisecond);

void BM_SelectLambda(benchmark::State& state) {
  const DrawMatrix d = simulate_draws(scenario(1), state.range(0), 1);
  const std::vector<double> x(d.summary.data(), d.summary.data() + d.size());
  const std::vector<double> y(d.phi.data(), d.phi.data() + d.size());
  for (auto _ : state) benchmark::DoNotOptimize(select_lambda_gcv(x, y, SplineConfig{}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SelectLambda)->Arg(2000)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_EssRegression(benchmark::State& state) {
  const Scenario& s = scenario(static_cast<int>(state.range(0)));
  const DrawMatrix d = simulate_draws(s, 10000, 1);
  for (auto _ : state) benchmark::DoNotOptimize(ess_regression(d, s, {}, 1));
  state.SetLabel(s.name);
}
BENCHMARK(BM_EssRegression)->DenseRange(0, 6)->Unit(benchmark::kMillisecond);

void BM_MetropolisChain(benchmark::State& state) {
  const Scenario& s = scenario(static_cast<int>(state.range(0)));
  DrawOptions opts;
  opts.retain_sufficient_stats = true;
  const DrawMatrix d = simulate_draws(s, 64, 1, opts);
  std::size_t i = 0;
  for (auto _ : state) {
    auto stream = substream(1, i, StreamPurpose::kMcmc);
    benchmark::DoNotOptimize(metropolis_posterior_mean(s, d.stats[i % 64], McmcConfig{}, stream));
    ++i;
  }
  state.SetLabel(s.name);
}
BENCHMARK(BM_MetropolisChain)->Arg(3)->Arg(5)->Arg(6)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
