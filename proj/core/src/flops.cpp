#include "slackwise/flops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slackwise/matrix.hpp"

namespace slackwise::linalg {

namespace {

struct Dims {
  double m;     // rows of the remaining matrix, n - k b
  double bk;    // width of panel k
  double rest;  // m - bk
  double kb;    // columns already factored
};

Dims dims(std::size_t n, std::size_t b, std::size_t k) {
  const BlockLayout layout(n, b);
  if (k >= layout.n_blocks())
    throw InvalidArgument("iteration " + std::to_string(k) + " out of range for n=" +
                          std::to_string(n) + ", b=" + std::to_string(b));
  const double m = static_cast<double>(n - layout.begin(k));
  const double bk = static_cast<double>(layout.size(k));
  return {m, bk, m - bk, static_cast<double>(layout.begin(k))};
}

// Shape of a GPU task viewed as out(R x C) -= A(R x K) B(K x C).
struct UpdateShape {
  double r = 0, c = 0, inner = 0;
};

UpdateShape update_shape(DecompositionKind kind, TaskKind task, const Dims& d) {
  switch (kind) {
    case DecompositionKind::LU:
      if (task == TaskKind::PU) return {d.bk, d.rest, d.bk};
      if (task == TaskKind::TMU) return {d.rest, d.rest, d.bk};
      break;
    case DecompositionKind::Cholesky:
      if (task == TaskKind::TMU) return {d.m, d.bk, d.kb};
      if (task == TaskKind::PU) return {d.rest, d.bk, d.bk};
      break;
    case DecompositionKind::QR:
      if (task == TaskKind::TMU) return {d.m, d.rest, d.bk};
      break;
  }
  return {};
}

// Rows and columns of the PD output that the CPU encodes.
UpdateShape pd_shape(DecompositionKind kind, const Dims& d) {
  if (kind == DecompositionKind::Cholesky) return {d.bk, d.bk, 0};
  return {d.m, d.bk, 0};
}

double ceil_blocks(double extent, double b) { return extent <= 0 ? 0.0 : std::ceil(extent / b); }

}  // namespace

double task_flops(DecompositionKind kind, TaskKind task, std::size_t n, std::size_t b,
                  std::size_t k) {
  const Dims d = dims(n, b, k);
  const double m = d.m, bk = d.bk, rest = d.rest;
  switch (kind) {
    case DecompositionKind::LU:
      switch (task) {
        case TaskKind::PD: {
          double f = 0;
          for (double j = 0; j < bk; ++j) f += (m - j - 1) + 2 * (m - j - 1) * (bk - j - 1);
          return f;
        }
        case TaskKind::PU: return bk * (bk - 1) * rest;
        case TaskKind::TMU: return 2 * rest * rest * bk;
        case TaskKind::Transfer: return 0;
      }
      break;
    case DecompositionKind::Cholesky:
      switch (task) {
        case TaskKind::PD: return bk * bk * bk / 3 + bk * bk / 2 + bk / 6;
        case TaskKind::PU: return bk * bk * rest;
        case TaskKind::TMU: return 2 * m * bk * d.kb;
        case TaskKind::Transfer: return 0;
      }
      break;
    case DecompositionKind::QR:
      switch (task) {
        case TaskKind::PD:
          return 2 * m * bk * bk - 2 * bk * bk * bk / 3 + m * bk + bk * bk + 14 * bk / 3;
        case TaskKind::PU: return 0;
        case TaskKind::TMU: return 4 * m * rest * bk - rest * bk * bk;
        case TaskKind::Transfer: return 0;
      }
      break;
  }
  return 0;
}

double transfer_bytes(DecompositionKind kind, std::size_t n, std::size_t b, std::size_t k) {
  const Dims d = dims(n, b, k);
  if (kind == DecompositionKind::Cholesky) return 2 * 8 * d.bk * d.bk;
  return 2 * 8 * d.m * d.bk;
}

double checksum_flops(ChecksumScheme scheme, DecompositionKind kind, TaskKind task,
                      ChecksumComponent component, std::size_t n, std::size_t b, std::size_t k) {
  const Dims d = dims(n, b, k);
  if (scheme == ChecksumScheme::None || task == TaskKind::Transfer) return 0;
  const bool full = scheme == ChecksumScheme::Full;
  const double bb = static_cast<double>(b);
  if (task == TaskKind::PD) {
    if (component == ChecksumComponent::Update) return 0;
    const UpdateShape s = pd_shape(kind, d);
    return (full ? 6 : 3) * s.r * s.c;
  }
  const UpdateShape s = update_shape(kind, task, d);
  if (s.r <= 0 || s.c <= 0) return 0;
  if (component == ChecksumComponent::Verify) return (full ? 6 : 3) * s.r * s.c;
  // Plain and weighted column checksums per block row; full adds row checksums
  // per block column.
  double f = 2 * ceil_blocks(s.r, bb) * 2 * s.inner * s.c;
  if (full) f += 2 * ceil_blocks(s.c, bb) * 2 * s.r * s.inner;
  return f;
}

double checksum_transfer_bytes(ChecksumScheme scheme, DecompositionKind kind, std::size_t n,
                               std::size_t b, std::size_t k) {
  const Dims d = dims(n, b, k);
  if (scheme == ChecksumScheme::None) return 0;
  const UpdateShape s = pd_shape(kind, d);
  const double bb = static_cast<double>(b);
  double bytes = 2 * ceil_blocks(s.r, bb) * s.c * 8;
  if (scheme == ChecksumScheme::Full) bytes += 2 * ceil_blocks(s.c, bb) * s.r * 8;
  return bytes;
}

double total_cpu_flops(DecompositionKind kind, std::size_t n, std::size_t b) {
  const BlockLayout layout(n, b);
  double f = 0;
  for (std::size_t k = 0; k < layout.n_blocks(); ++k) f += task_flops(kind, TaskKind::PD, n, b, k);
  return f;
}

double total_gpu_flops(DecompositionKind kind, std::size_t n, std::size_t b) {
  const BlockLayout layout(n, b);
  double f = 0;
  for (std::size_t k = 0; k < layout.n_blocks(); ++k)
    f += task_flops(kind, TaskKind::PU, n, b, k) + task_flops(kind, TaskKind::TMU, n, b, k);
  return f;
}

}  // namespace slackwise::linalg
