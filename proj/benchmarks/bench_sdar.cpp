#include <benchmark/benchmark.h>

#include "aftsdar/asdar.hpp"
#include "aftsdar/sdar.hpp"
#include "aftsdar/simgen.hpp"
#include "aftsdar/survival_data.hpp"

using namespace aftsdar;

namespace {

SimulatedInstance make_instance(int n, int p, int K) {
  ScenarioSpec spec;
  spec.n = n;
  spec.p = p;
  spec.K = K;
  spec.sigma = 1.0;
  spec.censor_rate = 0.3;
  spec.coef_kind = CoefKind::RatioScaled;
  spec.R = 5.0;
  spec.seed = 12345;
  return gen_instance(spec);
}

StandardizedDesign pipeline(const SurvivalDataset& ds) {
  const SortedSample s = sort_by_observed_time(ds);
  return build_standardized_design(s, kaplan_meier_weights(s));
}

void BM_KaplanMeierWeights(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SimulatedInstance inst = make_instance(n, 10, 3);
  const SortedSample sorted = sort_by_observed_time(inst.dataset);
  for (auto _ : state)
    benchmark::DoNotOptimize(kaplan_meier_weights(sorted));
}
BENCHMARK(BM_KaplanMeierWeights)->Arg(200)->Arg(2000)->Arg(20000);

void BM_Standardize(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const SimulatedInstance inst = make_instance(200, p, 5);
  const SortedSample sorted = sort_by_observed_time(inst.dataset);
  const KMWeights weights = kaplan_meier_weights(sorted);
  for (auto _ : state)
    benchmark::DoNotOptimize(build_standardized_design(sorted, weights));
}
BENCHMARK(BM_Standardize)->Arg(500)->Arg(2000);

void BM_ActiveLeastSquares(benchmark::State& state) {
  const int T = static_cast<int>(state.range(0));
  const SimulatedInstance inst = make_instance(500, 1000, T);
  const StandardizedDesign design = pipeline(inst.dataset);
  std::vector<int> active(T);
  for (int j = 0; j < T; ++j) active[j] = j;
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_active_least_squares(design, active));
}
BENCHMARK(BM_ActiveLeastSquares)->Arg(5)->Arg(20)->Arg(50);

void BM_SdarFit(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  const SimulatedInstance inst = make_instance(200, 1000, K);
  const StandardizedDesign design = pipeline(inst.dataset);
  SdarConfig config;
  config.T = K;
  for (auto _ : state)
    benchmark::DoNotOptimize(sdar_fit(design, config));
}
BENCHMARK(BM_SdarFit)->Arg(5)->Arg(10)->Arg(25);

void BM_AsdarHbicPath(benchmark::State& state) {
  const SimulatedInstance inst = make_instance(200, 1000, 10);
  const StandardizedDesign design = pipeline(inst.dataset);
  TuningConfig config;
  for (auto _ : state)
    benchmark::DoNotOptimize(asdar_path(design, config));
}
BENCHMARK(BM_AsdarHbicPath);

}  // namespace

BENCHMARK_MAIN();
