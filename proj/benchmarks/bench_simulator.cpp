#include <benchmark/benchmark.h>

#include "slackwise/simulator.hpp"

using namespace slackwise;

namespace {

void BM_SimulateRun(benchmark::State& state, sim::Engine engine) {
  sim::SimConfig c;
  c.n = static_cast<std::size_t>(state.range(0));
  c.r = 0.25;
  c.engine = engine;
  for (auto _ : state) benchmark::DoNotOptimize(sim::simulate_run(c).summary.total_energy_j);
}

void BM_SimulateAnalytic(benchmark::State& s) { BM_SimulateRun(s, sim::Engine::Analytic); }
void BM_SimulateNumeric(benchmark::State& s) { BM_SimulateRun(s, sim::Engine::Numeric); }

}  // namespace

BENCHMARK(BM_SimulateAnalytic)->Arg(8192)->Arg(30720)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateNumeric)->Arg(8192)->Arg(30720)->Unit(benchmark::kMillisecond);
