#include <random>

#include <benchmark/benchmark.h>

#include "circrel/resampler.hpp"
#include "circrel/variance_analytics.hpp"

namespace {

using namespace circrel;

Scenario exponential_plan(std::size_t k, double t) {
  Scenario s;
  s.plan.intervals.assign(k, t);
  for (std::size_t i = 0; i < k; ++i) s.legs.push_back(Leg::from_exponential({0.05, 0.02}, 20));
  return validate_scenario(std::move(s));
}

Scenario sampled_plan(std::size_t k, std::size_t n) {
  std::mt19937_64 gen(1);
  std::exponential_distribution<double> delay(0.05), service(0.02);
  Scenario s;
  s.plan.intervals.assign(k, 140.0);
  for (std::size_t i = 0; i < k; ++i) {
    LegSamples samples;
    for (std::size_t j = 0; j < n; ++j) {
      samples.delays.push_back(delay(gen));
      samples.services.push_back(service(gen));
    }
    s.legs.push_back(Leg::from_samples(std::move(samples)));
  }
  return validate_scenario(std::move(s));
}

void BM_VariancePipelineSweepPoint(benchmark::State& state) {
  const auto mode = static_cast<KernelMode>(state.range(0));
  const Scenario s = exponential_plan(5, 140);
  for (auto _ : state) benchmark::DoNotOptimize(variance_pipeline(s, 50, mode).variance);
}
BENCHMARK(BM_VariancePipelineSweepPoint)
    ->Arg(static_cast<int>(KernelMode::closed_form))
    ->Arg(static_cast<int>(KernelMode::quadrature));

void BM_Mu11(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto method = static_cast<Mu11Method>(state.range(1));
  const Scenario s = exponential_plan(k, 140);
  const auto kernels = scenario_kernels(s, KernelMode::closed_form);
  const std::vector<std::size_t> n(k, 20);
  for (auto _ : state) benchmark::DoNotOptimize(mixed_moment_mu11(kernels, n, n, method));
}
BENCHMARK(BM_Mu11)->ArgsProduct({{2, 5, 8, 10}, {static_cast<int>(Mu11Method::factorized),
                                                  static_cast<int>(Mu11Method::enumerate)}});

void BM_ResampleEstimate(benchmark::State& state) {
  const Scenario s = sampled_plan(5, 20);
  const ResamplingConfig config{static_cast<std::size_t>(state.range(0)), 42, 1};
  for (auto _ : state) benchmark::DoNotOptimize(resample_estimate(s, config).theta_star);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ResampleEstimate)->Arg(50)->Arg(10'000)->Arg(1'000'000);

}  // namespace

BENCHMARK_MAIN();
