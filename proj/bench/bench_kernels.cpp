// OpenMP kernels against their single-threaded references.

#include <benchmark/benchmark.h>

#include "uwcrb/config.hpp"
#include "uwcrb/montecarlo.hpp"
#include "uwcrb/ray.hpp"
#include "uwcrb/sweep.hpp"

namespace {

uwcrb::SweepConfig small_grid(std::size_t n_h, std::size_t n_z) {
  uwcrb::SweepConfig config = uwcrb::load_config(UWCRB_PRESET_DIR "/reference_grid.json");
  config.n_h = n_h;
  config.n_z = n_z;
  return config;
}

void BM_SweepParallel(benchmark::State& state) {
  const uwcrb::SweepConfig config = small_grid(40, 20);
  for (auto _ : state) benchmark::DoNotOptimize(uwcrb::run_sweep(config));
  state.SetItemsProcessed(state.iterations() * 40 * 20);
}

void BM_SweepSerial(benchmark::State& state) {
  const uwcrb::SweepConfig config = small_grid(40, 20);
  for (auto _ : state) benchmark::DoNotOptimize(uwcrb::run_sweep_serial(config));
  state.SetItemsProcessed(state.iterations() * 40 * 20);
}

struct McSetup {
  uwcrb::RayScenario truth;
  uwcrb::NoiseModel noise;
};

McSetup mc_setup() {
  const uwcrb::SweepConfig config = small_grid(2, 2);
  const uwcrb::SweepContext ctx = uwcrb::SweepContext::from_config(config);
  const double k0 = uwcrb::solve_k0_from_h(ctx.profile, ctx.source_depth, 1000.0, 8000.0);
  return {uwcrb::RayScenario{ctx.profile, ctx.source_depth, 1000.0, k0}, ctx.noise};
}

void BM_MonteCarloParallel(benchmark::State& state) {
  const McSetup s = mc_setup();
  for (auto _ : state) benchmark::DoNotOptimize(uwcrb::validate_bound(s.truth, s.noise, 200, 1));
  state.SetItemsProcessed(state.iterations() * 200);
}

void BM_MonteCarloSerial(benchmark::State& state) {
  const McSetup s = mc_setup();
  for (auto _ : state) {
    benchmark::DoNotOptimize(uwcrb::validate_bound_serial(s.truth, s.noise, 200, 1));
  }
  state.SetItemsProcessed(state.iterations() * 200);
}

}  // namespace

BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
