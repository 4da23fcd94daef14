#include "slackwise/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace slackwise::linalg {

namespace {

void require_iteration(const FactorizationState& s, std::size_t k) {
  if (k >= s.layout.n_blocks())
    throw InvalidArgument("iteration index " + std::to_string(k) + " out of range");
}

void lu_pd(FactorizationState& s, std::size_t k) {
  DenseMatrix& a = s.a;
  const std::size_t n = s.layout.n();
  const std::size_t c0 = s.layout.begin(k);
  const std::size_t bk = s.layout.size(k);
  for (std::size_t j = 0; j < bk; ++j) {
    const std::size_t cj = c0 + j;
    const double piv = a(cj, cj);
    if (piv == 0.0 || !std::isfinite(piv))
      throw NumericBreakdown("zero pivot in LU panel at column " + std::to_string(cj));
    for (std::size_t i = cj + 1; i < n; ++i) a(i, cj) /= piv;
    for (std::size_t jj = j + 1; jj < bk; ++jj) {
      const double u = a(cj, c0 + jj);
      if (u == 0.0) continue;
      for (std::size_t i = cj + 1; i < n; ++i) a(i, c0 + jj) -= a(i, cj) * u;
    }
  }
}

void lu_pu(FactorizationState& s, std::size_t k) {
  DenseMatrix& a = s.a;
  const std::size_t n = s.layout.n();
  const std::size_t c0 = s.layout.begin(k);
  const std::size_t bk = s.layout.size(k);
  for (std::size_t c = c0 + bk; c < n; ++c)
    for (std::size_t j = 0; j < bk; ++j) {
      const double x = a(c0 + j, c);
      if (x == 0.0) continue;
      for (std::size_t i = j + 1; i < bk; ++i) a(c0 + i, c) -= a(c0 + i, c0 + j) * x;
    }
}

void lu_tmu(FactorizationState& s, std::size_t k) {
  DenseMatrix& a = s.a;
  const std::size_t n = s.layout.n();
  const std::size_t c0 = s.layout.begin(k);
  const std::size_t c1 = s.layout.end(k);
  for (std::size_t c = c1; c < n; ++c)
    for (std::size_t p = c0; p < c1; ++p) {
      const double u = a(p, c);
      if (u == 0.0) continue;
      for (std::size_t i = c1; i < n; ++i) a(i, c) -= a(i, p) * u;
    }
}

void cholesky_tmu(FactorizationState& s, std::size_t k) {
  DenseMatrix& a = s.a;
  const std::size_t n = s.layout.n();
  const std::size_t c0 = s.layout.begin(k);
  const std::size_t c1 = s.layout.end(k);
  for (std::size_t c = c0; c < c1; ++c)
    for (std::size_t p = 0; p < c0; ++p) {
      const double u = a(c, p);
      if (u == 0.0) continue;
      for (std::size_t i = c0; i < n; ++i) a(i, c) -= a(i, p) * u;
    }
}

void cholesky_pd(FactorizationState& s, std::size_t k) {
  DenseMatrix& a = s.a;
  const std::size_t c0 = s.layout.begin(k);
  const std::size_t c1 = s.layout.end(k);
  for (std::size_t j = c0; j < c1; ++j) {
    const double d = a(j, j);
    if (!(d > 0.0) || !std::isfinite(d))
      throw NumericBreakdown("non-positive pivot in Cholesky at column " + std::to_string(j));
    const double l = std::sqrt(d);
    a(j, j) = l;
    for (std::size_t i = j + 1; i < c1; ++i) a(i, j) /= l;
    for (std::size_t jj = j + 1; jj < c1; ++jj) {
      const double u = a(jj, j);
      for (std::size_t i = jj; i < c1; ++i) a(i, jj) -= a(i, j) * u;
    }
  }
  for (std::size_t j = c0; j < c1; ++j)
    for (std::size_t i = c0; i < j; ++i) a(i, j) = 0.0;
}

void cholesky_pu(FactorizationState& s, std::size_t k) {
  DenseMatrix& a = s.a;
  const std::size_t n = s.layout.n();
  const std::size_t c0 = s.layout.begin(k);
  const std::size_t c1 = s.layout.end(k);
  for (std::size_t j = c0; j < c1; ++j) {
    for (std::size_t p = c0; p < j; ++p) {
      const double l = a(j, p);
      if (l == 0.0) continue;
      for (std::size_t i = c1; i < n; ++i) a(i, j) -= a(i, p) * l;
    }
    const double d = a(j, j);
    for (std::size_t i = c1; i < n; ++i) a(i, j) /= d;
  }
}

void qr_pd(FactorizationState& s, std::size_t k) {
  DenseMatrix& a = s.a;
  const std::size_t n = s.layout.n();
  const std::size_t c0 = s.layout.begin(k);
  const std::size_t c1 = s.layout.end(k);
  for (std::size_t j = c0; j < c1; ++j) {
    double scale = 0.0;
    for (std::size_t i = j + 1; i < n; ++i) scale = std::max(scale, std::abs(a(i, j)));
    double tau = 0.0;
    if (scale > 0.0) {
      double ssq = 0.0;
      for (std::size_t i = j + 1; i < n; ++i) ssq += (a(i, j) / scale) * (a(i, j) / scale);
      const double alpha = a(j, j);
      const double norm = std::hypot(alpha, scale * std::sqrt(ssq));
      const double beta = alpha >= 0.0 ? -norm : norm;
      tau = (beta - alpha) / beta;
      const double inv = 1.0 / (alpha - beta);
      for (std::size_t i = j + 1; i < n; ++i) a(i, j) *= inv;
      a(j, j) = beta;
      // Apply H = I - tau v v^T to the remaining panel columns.
      for (std::size_t c = j + 1; c < c1; ++c) {
        double w = a(j, c);
        for (std::size_t i = j + 1; i < n; ++i) w += a(i, j) * a(i, c);
        w *= tau;
        a(j, c) -= w;
        for (std::size_t i = j + 1; i < n; ++i) a(i, c) -= a(i, j) * w;
      }
    }
    s.tau[j] = tau;
  }
  s.t_factors[k] = householder_t(a, c0, c1 - c0, s.tau);
}

void qr_tmu(FactorizationState& s, std::size_t k) {
  DenseMatrix& a = s.a;
  const std::size_t n = s.layout.n();
  const std::size_t c0 = s.layout.begin(k);
  const std::size_t c1 = s.layout.end(k);
  const std::size_t bk = c1 - c0;
  if (c1 >= n) return;
  const DenseMatrix v = householder_v(a, c0, bk);
  const DenseMatrix& t = s.t_factors[k];
  const std::size_t m = n - c0;
  for (std::size_t c = c1; c < n; ++c) {
    // w = T^T V^T a(:, c); a(:, c) -= V w
    std::vector<double> w(bk, 0.0);
    for (std::size_t p = 0; p < bk; ++p) {
      double acc = 0.0;
      for (std::size_t i = p; i < m; ++i) acc += v(i, p) * a(c0 + i, c);
      w[p] = acc;
    }
    std::vector<double> tw(bk, 0.0);
    for (std::size_t q = 0; q < bk; ++q) {
      double acc = 0.0;
      for (std::size_t p = 0; p <= q; ++p) acc += t(p, q) * w[p];
      tw[q] = acc;
    }
    for (std::size_t p = 0; p < bk; ++p) {
      if (tw[p] == 0.0) continue;
      for (std::size_t i = p; i < m; ++i) a(c0 + i, c) -= v(i, p) * tw[p];
    }
  }
}

}  // namespace

FactorizationState begin_factorization(DecompositionKind kind, const DenseMatrix& a,
                                       std::size_t b) {
  if (a.rows() != a.cols()) throw InvalidArgument("factorization requires a square matrix");
  FactorizationState s{kind, BlockLayout(a.rows(), b), a, {}, {}, 0};
  if (kind == DecompositionKind::QR) {
    s.tau.assign(a.rows(), 0.0);
    s.t_factors.resize(s.layout.n_blocks());
  }
  return s;
}

std::vector<TaskKind> task_sequence(DecompositionKind kind) {
  switch (kind) {
    case DecompositionKind::Cholesky:
      return {TaskKind::TMU, TaskKind::PD, TaskKind::PU};
    case DecompositionKind::LU:
      return {TaskKind::PD, TaskKind::PU, TaskKind::TMU};
    case DecompositionKind::QR:
      return {TaskKind::PD, TaskKind::TMU};
  }
  return {};
}

BlockRegion task_output_region(DecompositionKind kind, TaskKind task, const BlockLayout& layout,
                               std::size_t k) {
  const std::size_t nb = layout.n_blocks();
  if (k >= nb) throw InvalidArgument("iteration index out of range");
  switch (kind) {
    case DecompositionKind::LU:
      switch (task) {
        case TaskKind::PD: return {k, nb, k, k + 1};
        case TaskKind::PU: return {k, k + 1, k + 1, nb};
        case TaskKind::TMU: return {k + 1, nb, k + 1, nb};
        case TaskKind::Transfer: return {k, nb, k, k + 1};
      }
      break;
    case DecompositionKind::Cholesky:
      switch (task) {
        case TaskKind::TMU: return k == 0 ? BlockRegion{} : BlockRegion{k, nb, k, k + 1};
        case TaskKind::PD: return {k, k + 1, k, k + 1};
        case TaskKind::PU: return {k + 1, nb, k, k + 1};
        case TaskKind::Transfer: return {k, k + 1, k, k + 1};
      }
      break;
    case DecompositionKind::QR:
      switch (task) {
        case TaskKind::PD: return {k, nb, k, k + 1};
        case TaskKind::PU: return {};
        case TaskKind::TMU: return {k, nb, k + 1, nb};
        case TaskKind::Transfer: return {k, nb, k, k + 1};
      }
      break;
  }
  return {};
}

void run_task(FactorizationState& s, TaskKind task, std::size_t k) {
  require_iteration(s, k);
  switch (s.kind) {
    case DecompositionKind::LU:
      if (task == TaskKind::PD) lu_pd(s, k);
      else if (task == TaskKind::PU) lu_pu(s, k);
      else if (task == TaskKind::TMU) lu_tmu(s, k);
      break;
    case DecompositionKind::Cholesky:
      if (task == TaskKind::PD) cholesky_pd(s, k);
      else if (task == TaskKind::PU) cholesky_pu(s, k);
      else if (task == TaskKind::TMU) cholesky_tmu(s, k);
      break;
    case DecompositionKind::QR:
      if (task == TaskKind::PD) qr_pd(s, k);
      else if (task == TaskKind::TMU) qr_tmu(s, k);
      break;
  }
}

void run_iteration(FactorizationState& s, std::size_t k) {
  require_iteration(s, k);
  if (k != s.iterations_done)
    throw InvalidArgument("iterations must run in order; expected " +
                          std::to_string(s.iterations_done));
  for (TaskKind t : task_sequence(s.kind)) run_task(s, t, k);
  ++s.iterations_done;
}

void factorize_all(FactorizationState& s) {
  for (std::size_t k = s.iterations_done; k < s.layout.n_blocks(); ++k) run_iteration(s, k);
}

DenseMatrix householder_v(const DenseMatrix& a, std::size_t col, std::size_t width) {
  const std::size_t m = a.rows() - col;
  DenseMatrix v(m, width);
  for (std::size_t p = 0; p < width; ++p) {
    v(p, p) = 1.0;
    for (std::size_t i = p + 1; i < m; ++i) v(i, p) = a(col + i, col + p);
  }
  return v;
}

DenseMatrix householder_t(const DenseMatrix& a, std::size_t col, std::size_t width,
                          const std::vector<double>& tau) {
  const DenseMatrix v = householder_v(a, col, width);
  const std::size_t m = v.rows();
  DenseMatrix t(width, width);
  for (std::size_t j = 0; j < width; ++j) {
    const double tj = tau[col + j];
    t(j, j) = tj;
    if (tj == 0.0 || j == 0) continue;
    // t(0:j, j) = -tau_j T(0:j, 0:j) V(:, 0:j)^T v_j
    std::vector<double> z(j, 0.0);
    for (std::size_t p = 0; p < j; ++p) {
      double acc = 0.0;
      for (std::size_t i = j; i < m; ++i) acc += v(i, p) * v(i, j);
      z[p] = -tj * acc;
    }
    for (std::size_t p = 0; p < j; ++p) {
      double acc = 0.0;
      for (std::size_t q = p; q < j; ++q) acc += t(p, q) * z[q];
      t(p, j) = acc;
    }
  }
  return t;
}

DenseMatrix reconstruct(const FactorizationState& s) {
  const std::size_t n = s.layout.n();
  const DenseMatrix& a = s.a;
  switch (s.kind) {
    case DecompositionKind::LU: {
      DenseMatrix l(n, n), u(n, n);
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
          if (i > j) l(i, j) = a(i, j);
          else u(i, j) = a(i, j);
          if (i == j) l(i, j) = 1.0;
        }
      return multiply(l, u);
    }
    case DecompositionKind::Cholesky: {
      DenseMatrix l(n, n);
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = j; i < n; ++i) l(i, j) = a(i, j);
      return multiply(l, transpose(l));
    }
    case DecompositionKind::QR: {
      DenseMatrix r(n, n);
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i <= j; ++i) r(i, j) = a(i, j);
      for (std::size_t jr = n; jr-- > 0;) {
        const double tau = s.tau[jr];
        if (tau == 0.0) continue;
        for (std::size_t c = 0; c < n; ++c) {
          double w = r(jr, c);
          for (std::size_t i = jr + 1; i < n; ++i) w += a(i, jr) * r(i, c);
          w *= tau;
          if (w == 0.0) continue;
          r(jr, c) -= w;
          for (std::size_t i = jr + 1; i < n; ++i) r(i, c) -= a(i, jr) * w;
        }
      }
      return r;
    }
  }
  return {};
}

double residual(const DenseMatrix& a, const FactorizationState& s) {
  if (!s.complete()) throw InvalidArgument("residual requires a complete factorization");
  const double diff = subtract(a, reconstruct(s)).frobenius_norm();
  const double norm = a.frobenius_norm();
  return norm == 0.0 ? diff : diff / norm;
}

}  // namespace slackwise::linalg
