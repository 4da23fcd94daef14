#pragma once

#include <cstddef>

#include "slackwise/types.hpp"

namespace slackwise::linalg {

/// Checksum work attached to a task: maintaining checksums through the
/// task's arithmetic, or recomputing and comparing them afterwards.
enum class ChecksumComponent { Update, Verify };

/// Exact flop count of one task at 0-based iteration k. Transfer has no flops;
/// use transfer_bytes. Tasks absent for a kind (QR PU, Cholesky TMU at k = 0)
/// count 0.
double task_flops(DecompositionKind kind, TaskKind task, std::size_t n, std::size_t b,
                  std::size_t k);

/// Bytes moved over the host-device link at iteration k (panel out and back).
double transfer_bytes(DecompositionKind kind, std::size_t n, std::size_t b, std::size_t k);

/// Checksum flops for a compute task. PD checksums are encoded on the CPU and
/// counted as Verify work; their Update component is 0.
double checksum_flops(ChecksumScheme scheme, DecompositionKind kind, TaskKind task,
                      ChecksumComponent component, std::size_t n, std::size_t b, std::size_t k);

/// Checksum bytes that travel with the panel.
double checksum_transfer_bytes(ChecksumScheme scheme, DecompositionKind kind, std::size_t n,
                               std::size_t b, std::size_t k);

/// Total flops of a whole factorization on one processor (PD on CPU, PU and
/// TMU on GPU), without checksums.
double total_cpu_flops(DecompositionKind kind, std::size_t n, std::size_t b);
double total_gpu_flops(DecompositionKind kind, std::size_t n, std::size_t b);

}  // namespace slackwise::linalg
