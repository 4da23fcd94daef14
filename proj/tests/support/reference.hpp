#pragma once

// Unblocked reference factorizations and small oracles shared by the unit and
// acceptance tests. Nothing here calls into the library's kernels.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

#include "slackwise/matrix.hpp"

namespace slackwise::testing {

using linalg::DenseMatrix;

/// Right-looking elimination without pivoting; unit-lower L below the
/// diagonal, U on and above.
inline DenseMatrix reference_lu(DenseMatrix a) {
  const std::size_t n = a.rows();
  for (std::size_t j = 0; j < n; ++j) {
    if (a(j, j) == 0) throw std::runtime_error("reference_lu: zero pivot");
    for (std::size_t i = j + 1; i < n; ++i) a(i, j) /= a(j, j);
    for (std::size_t c = j + 1; c < n; ++c)
      for (std::size_t i = j + 1; i < n; ++i) a(i, c) -= a(i, j) * a(j, c);
  }
  return a;
}

/// Classic column Cholesky; returns L with zeros above the diagonal.
inline DenseMatrix reference_cholesky(const DenseMatrix& a) {
  const std::size_t n = a.rows();
  DenseMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t p = 0; p < j; ++p) d -= l(j, p) * l(j, p);
    if (!(d > 0)) throw std::runtime_error("reference_cholesky: not positive definite");
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t p = 0; p < j; ++p) s -= l(i, p) * l(j, p);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

/// R of an unblocked modified Gram-Schmidt QR, with a positive diagonal.
inline DenseMatrix reference_qr_r(const DenseMatrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  DenseMatrix q = a;
  DenseMatrix r(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double nrm = 0;
    for (std::size_t i = 0; i < m; ++i) nrm += q(i, j) * q(i, j);
    r(j, j) = std::sqrt(nrm);
    for (std::size_t i = 0; i < m; ++i) q(i, j) /= r(j, j);
    for (std::size_t c = j + 1; c < n; ++c) {
      double dot = 0;
      for (std::size_t i = 0; i < m; ++i) dot += q(i, j) * q(i, c);
      r(j, c) = dot;
      for (std::size_t i = 0; i < m; ++i) q(i, c) -= dot * q(i, j);
    }
  }
  return r;
}

/// ‖x − y‖_F / ‖y‖_F over the elements selected by `keep(i, j)`.
template <typename Keep>
double relative_difference(const DenseMatrix& x, const DenseMatrix& y, Keep keep) {
  double num = 0, den = 0;
  for (std::size_t j = 0; j < y.cols(); ++j)
    for (std::size_t i = 0; i < y.rows(); ++i) {
      if (!keep(i, j)) continue;
      const double d = x(i, j) - y(i, j);
      num += d * d;
      den += y(i, j) * y(i, j);
    }
  return den == 0 ? std::sqrt(num) : std::sqrt(num / den);
}

/// Blocked QR stores R with arbitrary row signs; flip each row so the
/// diagonal is positive, keeping only the upper triangle.
inline DenseMatrix normalized_r(const DenseMatrix& factored) {
  const std::size_t n = factored.cols();
  DenseMatrix r(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = factored(i, i) < 0 ? -1.0 : 1.0;
    for (std::size_t j = i; j < n; ++j) r(i, j) = s * factored(i, j);
  }
  return r;
}

/// Determinant by Gaussian elimination with partial pivoting.
inline double determinant(DenseMatrix a) {
  const std::size_t n = a.rows();
  double det = 1;
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t p = j;
    for (std::size_t i = j + 1; i < n; ++i)
      if (std::abs(a(i, j)) > std::abs(a(p, j))) p = i;
    if (a(p, j) == 0) return 0;
    if (p != j) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(p, c), a(j, c));
      det = -det;
    }
    det *= a(j, j);
    for (std::size_t i = j + 1; i < n; ++i) {
      const double f = a(i, j) / a(j, j);
      for (std::size_t c = j; c < n; ++c) a(i, c) -= f * a(j, c);
    }
  }
  return det;
}

/// Monte-Carlo placement oracle for fault coverage: draw Poisson counts per
/// kind, place each fault in one of `slots` slots, succeed when the scheme can
/// correct the placement. Single side tolerates distinct 0D slots and no 1D or
/// 2D faults; full tolerates 0D and 1D faults that all occupy distinct slots.
struct CoverageEstimate {
  double p = 0;
  double sigma = 0;
};

inline CoverageEstimate monte_carlo_coverage(bool full, std::size_t slots, double m0, double m1,
                                             double m2, std::size_t trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::poisson_distribution<long> d0(m0), d1(m1), d2(m2);
  std::uniform_int_distribution<std::size_t> slot(0, slots - 1);
  std::vector<char> used(slots);
  std::size_t ok = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const long c0 = m0 > 0 ? d0(rng) : 0;
    const long c1 = m1 > 0 ? d1(rng) : 0;
    const long c2 = m2 > 0 ? d2(rng) : 0;
    if (c2 > 0) continue;
    if (!full && c1 > 0) continue;
    const long total = c0 + (full ? c1 : 0);
    if (total > static_cast<long>(slots)) continue;
    std::fill(used.begin(), used.end(), 0);
    bool distinct = true;
    for (long i = 0; i < total && distinct; ++i) {
      const std::size_t s = slot(rng);
      if (used[s]) distinct = false;
      used[s] = 1;
    }
    ok += distinct;
  }
  const double p = static_cast<double>(ok) / static_cast<double>(trials);
  return {p, std::sqrt(std::max(p * (1 - p), 1e-12) / static_cast<double>(trials))};
}

}  // namespace slackwise::testing
