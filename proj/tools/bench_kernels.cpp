#include <benchmark/benchmark.h>

#include "solace/config.hpp"

using namespace solace;

namespace {

const RunConfig& config() {
  static const RunConfig cfg = load_config(SOLACE_SOURCE_DIR "/configs/district_a.json");
  return cfg;
}

const Environment& environment() {
  static const Environment env = load_environment(config().environment);
  return env;
}

// A simulation advanced past pre-evacuation so most agents are moving.
Simulation warm(bool parallel) {
  SimConfig sp = config().sim;
  sp.parallel = parallel;
  Simulation sim(environment(), *config().scenario("S1"), config().model, sp);
  for (int k = 0; k < 120; ++k) sim.step();
  return sim;
}

void BM_StepSerial(benchmark::State& state) {
  const Simulation base = warm(false);
  for (auto _ : state) {
    state.PauseTiming();
    Simulation sim = base;
    state.ResumeTiming();
    sim.step_serial();
    benchmark::DoNotOptimize(sim.time());
  }
}

void BM_StepParallel(benchmark::State& state) {
  const Simulation base = warm(true);
  for (auto _ : state) {
    state.PauseTiming();
    Simulation sim = base;
    state.ResumeTiming();
    sim.step_parallel();
    benchmark::DoNotOptimize(sim.time());
  }
}

void BM_RouteTableSerial(benchmark::State& state) {
  const EdgeMask mask(environment().roads.edges.size());
  for (auto _ : state) benchmark::DoNotOptimize(route_table_serial(environment(), mask));
}

void BM_RouteTableParallel(benchmark::State& state) {
  const EdgeMask mask(environment().roads.edges.size());
  for (auto _ : state) benchmark::DoNotOptimize(route_table_parallel(environment(), mask));
}

}  // namespace

BENCHMARK(BM_StepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StepParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RouteTableSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RouteTableParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
