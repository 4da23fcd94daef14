#include <benchmark/benchmark.h>

#include "slackwise/coverage.hpp"

using namespace slackwise::coverage;

namespace {

void BM_FcFull(benchmark::State& state) {
  const auto slots = static_cast<std::size_t>(state.range(0));
  double m0 = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fc_full_means(slots, m0, 0.2, 0.001));
    m0 += 1e-12;
  }
}

void BM_AdaptiveAbft(benchmark::State& state) {
  const ErrorRateTable table = ErrorRateTable::default_gpu();
  const CoverageParams params{static_cast<std::size_t>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(adaptive_abft(params, table, 2200, 1300, 0.5, 300));
}

}  // namespace

BENCHMARK(BM_FcFull)->Arg(16)->Arg(256)->Arg(3600);
BENCHMARK(BM_AdaptiveAbft)->Arg(16)->Arg(3600);
