#include <benchmark/benchmark.h>

#include "slackwise/abft.hpp"
#include "slackwise/factorization.hpp"

using namespace slackwise;

namespace {

void factor(benchmark::State& state, DecompositionKind kind, ChecksumScheme scheme) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const linalg::DenseMatrix a = linalg::generate_test_matrix(kind, n, 1);
  for (auto _ : state) {
    linalg::FactorizationState s = linalg::begin_factorization(kind, a, 32);
    for (std::size_t k = 0; k < s.layout.n_blocks(); ++k) {
      for (TaskKind t : linalg::task_sequence(kind)) abft::protected_task(s, t, k, scheme, {});
      ++s.iterations_done;
    }
    benchmark::DoNotOptimize(s.a.data().data());
  }
}

void BM_CholeskyPlain(benchmark::State& s) { factor(s, DecompositionKind::Cholesky, ChecksumScheme::None); }
void BM_LuPlain(benchmark::State& s) { factor(s, DecompositionKind::LU, ChecksumScheme::None); }
void BM_QrPlain(benchmark::State& s) { factor(s, DecompositionKind::QR, ChecksumScheme::None); }
void BM_LuSingleSide(benchmark::State& s) { factor(s, DecompositionKind::LU, ChecksumScheme::SingleSide); }
void BM_LuFull(benchmark::State& s) { factor(s, DecompositionKind::LU, ChecksumScheme::Full); }

}  // namespace

BENCHMARK(BM_CholeskyPlain)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LuPlain)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_QrPlain)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LuSingleSide)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LuFull)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
