#include "slackwise/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace slackwise::linalg {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double DenseMatrix::frobenius_norm() const {
  // Scaled accumulation keeps large entries from overflowing the sum.
  double scale = 0.0;
  double ssq = 1.0;
  for (double v : data_) {
    if (v == 0.0) continue;
    const double a = std::abs(v);
    if (scale < a) {
      ssq = 1.0 + ssq * (scale / a) * (scale / a);
      scale = a;
    } else {
      ssq += (a / scale) * (a / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

bool DenseMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw InvalidArgument("multiply: inner dimension mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t p = 0; p < a.cols(); ++p) {
      const double bpj = b(p, j);
      if (bpj == 0.0) continue;
      for (std::size_t i = 0; i < a.rows(); ++i) c(i, j) += a(i, p) * bpj;
    }
  }
  return c;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) t(j, i) = a(i, j);
  return t;
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InvalidArgument("subtract: shape mismatch");
  DenseMatrix c = a;
  auto cd = c.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < cd.size(); ++i) cd[i] -= bd[i];
  return c;
}

BlockLayout::BlockLayout(std::size_t n, std::size_t b) : n_(n), b_(b) {
  if (b == 0 || b > n) throw InvalidArgument("block layout requires 1 <= b <= n");
  n_blocks_ = (n + b - 1) / b;
}

std::size_t BlockLayout::size(std::size_t block) const {
  const std::size_t start = begin(block);
  return start >= n_ ? 0 : std::min(b_, n_ - start);
}

DenseMatrix generate_test_matrix(DecompositionKind kind, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("generate_test_matrix: n must be >= 1");
  std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(kind) + 1)));
  // Uniform doubles built from raw 53-bit draws; std::uniform_real_distribution
  // is not specified bit-exactly across standard libraries.
  auto uniform = [&rng] {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  };
  DenseMatrix a(n, n);
  switch (kind) {
    case DecompositionKind::Cholesky:
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = j; i < n; ++i) {
          const double v = uniform();
          a(i, j) = v;
          a(j, i) = v;
        }
      // Off-diagonal row sums are below n - 1, so a diagonal of n makes the
      // matrix strictly diagonally dominant with a positive diagonal, hence SPD.
      for (std::size_t i = 0; i < n; ++i) a(i, i) = static_cast<double>(n) + std::abs(a(i, i));
      break;
    case DecompositionKind::LU:
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) a(i, j) = uniform();
      for (std::size_t i = 0; i < n; ++i)
        a(i, i) = (a(i, i) < 0 ? -1.0 : 1.0) * (static_cast<double>(n) + 1.0);
      break;
    case DecompositionKind::QR:
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) a(i, j) = uniform();
      break;
  }
  return a;
}

}  // namespace slackwise::linalg
