#pragma once

#include <cstddef>
#include <vector>

#include "slackwise/matrix.hpp"
#include "slackwise/types.hpp"

namespace slackwise::linalg {

/// In-place blocked factorization.
///
/// LU (no pivoting) stores unit-lower L below the diagonal and U on and above
/// it. Cholesky is left-looking and stores L in the lower triangle; entries
/// strictly above the diagonal blocks are left untouched. QR stores R on and
/// above the diagonal and the Householder vectors below it, with the scalar
/// factors in `tau` and one compact-WY T factor per panel.
struct FactorizationState {
  DecompositionKind kind;
  BlockLayout layout;
  DenseMatrix a;
  std::vector<double> tau;
  std::vector<DenseMatrix> t_factors;
  std::size_t iterations_done = 0;

  bool complete() const { return iterations_done == layout.n_blocks(); }
};

FactorizationState begin_factorization(DecompositionKind kind, const DenseMatrix& a,
                                       std::size_t b);

/// Tasks of one iteration in execution order. Cholesky runs its update first
/// (left-looking); LU and QR run PD, PU, TMU. QR has no separate PU.
std::vector<TaskKind> task_sequence(DecompositionKind kind);

/// Blocks written by a task at iteration k.
BlockRegion task_output_region(DecompositionKind kind, TaskKind task, const BlockLayout& layout,
                               std::size_t k);

void run_task(FactorizationState& state, TaskKind task, std::size_t k);

/// Runs all tasks of iteration k. Iterations must be run in order.
void run_iteration(FactorizationState& state, std::size_t k);

void factorize_all(FactorizationState& state);

/// Product of the stored factors (LU, LLᵀ or QR).
DenseMatrix reconstruct(const FactorizationState& state);

/// ‖A − reconstruct(state)‖_F / ‖A‖_F. Throws if the factorization is incomplete.
double residual(const DenseMatrix& a, const FactorizationState& state);

/// Compact-WY T factor for the Householder vectors stored in columns
/// [col, col + width) of `a` starting at row `col`.
DenseMatrix householder_t(const DenseMatrix& a, std::size_t col, std::size_t width,
                          const std::vector<double>& tau);

/// Explicit unit-lower Householder panel V (rows from `col` to the end).
DenseMatrix householder_v(const DenseMatrix& a, std::size_t col, std::size_t width);

}  // namespace slackwise::linalg
