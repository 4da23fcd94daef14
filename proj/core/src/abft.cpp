#include "slackwise/abft.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>

namespace slackwise::abft {

using linalg::BlockLayout;
using linalg::BlockRegion;
using linalg::DenseMatrix;
using linalg::FactorizationState;

namespace {

using Vec = std::vector<double>;
using Map = std::function<Vec(const Vec&)>;

struct Bounds {
  std::size_t r0 = 0, r1 = 0, c0 = 0, c1 = 0;
};

Bounds element_bounds(const BlockLayout& layout, const BlockRegion& region) {
  if (region.empty()) return {};
  return {layout.begin(region.row_begin), layout.end(region.row_end - 1),
          layout.begin(region.col_begin), layout.end(region.col_end - 1)};
}

double block_max(const DenseMatrix& m, const BlockLayout& layout, std::size_t bi,
                 std::size_t bj) {
  double mx = 0.0;
  for (std::size_t j = layout.begin(bj); j < layout.end(bj); ++j)
    for (std::size_t i = layout.begin(bi); i < layout.end(bi); ++i)
      mx = std::max(mx, std::abs(m(i, j)));
  return mx;
}

BlockChecksums empty_sums(const BlockLayout& layout, const BlockRegion& region,
                          ChecksumScheme scheme) {
  BlockChecksums s;
  s.scheme = scheme;
  s.region = region;
  const Bounds b = element_bounds(layout, region);
  s.row_begin = b.r0;
  s.row_end = b.r1;
  s.col_begin = b.c0;
  s.col_end = b.c1;
  return s;
}

// Builds the checksum set by pushing plain and weighted selector vectors for
// every block row (and block column, for the full scheme) through the maps.
BlockChecksums build(const DenseMatrix& pre, const BlockLayout& layout, const BlockRegion& region,
                     ChecksumScheme scheme, const Map& col_map, const Map& row_map) {
  BlockChecksums s = empty_sums(layout, region, scheme);
  if (region.empty() || scheme == ChecksumScheme::None) return s;
  const std::size_t rows = s.row_end - s.row_begin;
  const std::size_t cols = s.col_end - s.col_begin;
  for (std::size_t bi = region.row_begin; bi < region.row_end; ++bi) {
    Vec u(rows, 0.0), uw(rows, 0.0);
    for (std::size_t i = layout.begin(bi); i < layout.end(bi); ++i) {
      u[i - s.row_begin] = 1.0;
      uw[i - s.row_begin] = static_cast<double>(i - layout.begin(bi) + 1);
    }
    s.col_plain.push_back(col_map(u));
    s.col_weighted.push_back(col_map(uw));
  }
  if (scheme == ChecksumScheme::Full) {
    for (std::size_t bj = region.col_begin; bj < region.col_end; ++bj) {
      Vec v(cols, 0.0), vw(cols, 0.0);
      for (std::size_t j = layout.begin(bj); j < layout.end(bj); ++j) {
        v[j - s.col_begin] = 1.0;
        vw[j - s.col_begin] = static_cast<double>(j - layout.begin(bj) + 1);
      }
      s.row_plain.push_back(row_map(v));
      s.row_weighted.push_back(row_map(vw));
    }
  }
  for (std::size_t bi = region.row_begin; bi < region.row_end; ++bi)
    for (std::size_t bj = region.col_begin; bj < region.col_end; ++bj)
      s.scale.push_back(block_max(pre, layout, bi, bj));
  return s;
}

// u^T X and X v for the X = m(r0:r1, c0:c1) window. Only the nonzero span
// of u is visited, so block selectors cost one block row.
Vec left_apply(const DenseMatrix& m, std::size_t r0, std::size_t r1, std::size_t c0,
               std::size_t c1, const Vec& u) {
  Vec out(c1 - c0, 0.0);
  std::size_t lo = 0, hi = u.size();
  while (lo < hi && u[lo] == 0.0) ++lo;
  while (hi > lo && u[hi - 1] == 0.0) --hi;
  if (lo == hi) return out;
  for (std::size_t j = c0; j < c1; ++j) {
    double acc = 0.0;
    for (std::size_t i = r0 + lo; i < r0 + hi; ++i) acc += u[i - r0] * m(i, j);
    out[j - c0] = acc;
  }
  (void)r1;
  return out;
}

Vec right_apply(const DenseMatrix& m, std::size_t r0, std::size_t r1, std::size_t c0,
                std::size_t c1, const Vec& v) {
  Vec out(r1 - r0, 0.0);
  for (std::size_t j = c0; j < c1; ++j) {
    const double vj = v[j - c0];
    if (vj == 0.0) continue;
    for (std::size_t i = r0; i < r1; ++i) out[i - r0] += m(i, j) * vj;
  }
  return out;
}

void axpy_left(const DenseMatrix& m, std::size_t r0, std::size_t r1, std::size_t c0,
               std::size_t c1, const Vec& t, Vec& out) {
  // out -= t^T * m(r0:r1, c0:c1), t indexed by rows
  const Vec p = left_apply(m, r0, r1, c0, c1, t);
  for (std::size_t j = 0; j < p.size(); ++j) out[j] -= p[j];
}

}  // namespace

void CorrectionReport::merge(const CorrectionReport& o) {
  for (std::size_t i = 0; i < 3; ++i) {
    detected[i] += o.detected[i];
    corrected[i] += o.corrected[i];
  }
  uncorrectable = uncorrectable || o.uncorrectable;
  locations.insert(locations.end(), o.locations.begin(), o.locations.end());
}

BlockChecksums encode_region(const DenseMatrix& m, const BlockLayout& layout,
                             const BlockRegion& region, ChecksumScheme scheme) {
  const Bounds b = element_bounds(layout, region);
  Map col = [&](const Vec& u) { return left_apply(m, b.r0, b.r1, b.c0, b.c1, u); };
  Map row = [&](const Vec& v) { return right_apply(m, b.r0, b.r1, b.c0, b.c1, v); };
  return build(m, layout, region, scheme, col, row);
}

BlockChecksums encode(const DenseMatrix& m, const BlockLayout& layout, ChecksumScheme scheme) {
  if (m.rows() != layout.n() || m.cols() != layout.n())
    throw InvalidArgument("encode: matrix does not match layout");
  return encode_region(m, layout, {0, layout.n_blocks(), 0, layout.n_blocks()}, scheme);
}

BlockChecksums maintain(const FactorizationState& pre, TaskKind task, std::size_t k,
                        ChecksumScheme scheme) {
  const BlockLayout& layout = pre.layout;
  const DenseMatrix& a = pre.a;
  const BlockRegion region = linalg::task_output_region(pre.kind, task, layout, k);
  // CPU-side work carries no checksums.
  if (task == TaskKind::PD || task == TaskKind::Transfer)
    return empty_sums(layout, region, ChecksumScheme::None);
  if (region.empty() || scheme == ChecksumScheme::None) return empty_sums(layout, region, scheme);

  const std::size_t n = layout.n();
  const std::size_t p0 = layout.begin(k);
  const std::size_t p1 = layout.end(k);
  const std::size_t bk = p1 - p0;
  Map col, row;

  switch (pre.kind) {
    case DecompositionKind::LU:
      if (task == TaskKind::PU) {
        // U12 = L11^{-1} A12
        col = [&, p0, p1, bk](const Vec& u) {
          Vec y = u;
          for (std::size_t i = bk; i-- > 0;)
            for (std::size_t j = i + 1; j < bk; ++j) y[i] -= a(p0 + j, p0 + i) * y[j];
          return left_apply(a, p0, p1, p1, n, y);
        };
        row = [&, p0, p1, bk](const Vec& v) {
          Vec z = right_apply(a, p0, p1, p1, n, v);
          for (std::size_t i = 0; i < bk; ++i)
            for (std::size_t j = 0; j < i; ++j) z[i] -= a(p0 + i, p0 + j) * z[j];
          return z;
        };
      } else {
        // A22 -= L21 U12
        col = [&, p0, p1](const Vec& u) {
          Vec s = left_apply(a, p1, n, p1, n, u);
          const Vec t = left_apply(a, p1, n, p0, p1, u);
          axpy_left(a, p0, p1, p1, n, t, s);
          return s;
        };
        row = [&, p0, p1](const Vec& v) {
          Vec z = right_apply(a, p1, n, p1, n, v);
          const Vec w = right_apply(a, p0, p1, p1, n, v);
          const Vec lw = right_apply(a, p1, n, p0, p1, w);
          for (std::size_t i = 0; i < z.size(); ++i) z[i] -= lw[i];
          return z;
        };
      }
      break;
    case DecompositionKind::Cholesky:
      if (task == TaskKind::TMU) {
        // A(p0:, p0:p1) -= P Q^T with P = L(p0:, :p0), Q = L(p0:p1, :p0)
        col = [&, p0, p1](const Vec& u) {
          Vec s = left_apply(a, p0, n, p0, p1, u);
          const Vec t = left_apply(a, p0, n, 0, p0, u);
          const Vec qt = right_apply(a, p0, p1, 0, p0, t);
          for (std::size_t j = 0; j < s.size(); ++j) s[j] -= qt[j];
          return s;
        };
        row = [&, p0, p1](const Vec& v) {
          Vec z = right_apply(a, p0, n, p0, p1, v);
          const Vec w = left_apply(a, p0, p1, 0, p0, v);
          const Vec pw = right_apply(a, p0, n, 0, p0, w);
          for (std::size_t i = 0; i < z.size(); ++i) z[i] -= pw[i];
          return z;
        };
      } else {
        // X = A L^{-T}
        col = [&, p0, p1, bk](const Vec& u) {
          Vec c = left_apply(a, p1, n, p0, p1, u);
          for (std::size_t j = 0; j < bk; ++j) {
            for (std::size_t q = 0; q < j; ++q) c[j] -= a(p0 + j, p0 + q) * c[q];
            c[j] /= a(p0 + j, p0 + j);
          }
          return c;
        };
        row = [&, p0, p1, bk](const Vec& v) {
          Vec y = v;
          for (std::size_t j = bk; j-- > 0;) {
            for (std::size_t q = j + 1; q < bk; ++q) y[j] -= a(p0 + q, p0 + j) * y[q];
            y[j] /= a(p0 + j, p0 + j);
          }
          return right_apply(a, p1, n, p0, p1, y);
        };
      }
      break;
    case DecompositionKind::QR: {
      // C := C - V W with W = T^T V^T C recomputed here from the pre-task data.
      auto v = std::make_shared<DenseMatrix>(linalg::householder_v(a, p0, bk));
      const DenseMatrix& t = pre.t_factors.at(k);
      const std::size_t m = n - p0;
      auto w = std::make_shared<DenseMatrix>(bk, n - p1);
      for (std::size_t c = p1; c < n; ++c) {
        Vec g(bk, 0.0);
        for (std::size_t p = 0; p < bk; ++p) {
          double acc = 0.0;
          for (std::size_t i = p; i < m; ++i) acc += (*v)(i, p) * a(p0 + i, c);
          g[p] = acc;
        }
        for (std::size_t q = 0; q < bk; ++q) {
          double acc = 0.0;
          for (std::size_t p = 0; p <= q; ++p) acc += t(p, q) * g[p];
          (*w)(q, c - p1) = acc;
        }
      }
      col = [&, v, w, p0, p1, bk, m](const Vec& u) {
        Vec s = left_apply(a, p0, n, p1, n, u);
        const Vec uv = left_apply(*v, 0, m, 0, bk, u);
        axpy_left(*w, 0, bk, 0, n - p1, uv, s);
        return s;
      };
      row = [&, v, w, p0, p1, bk, m](const Vec& vv) {
        Vec z = right_apply(a, p0, n, p1, n, vv);
        const Vec wv = right_apply(*w, 0, bk, 0, n - p1, vv);
        const Vec vwv = right_apply(*v, 0, m, 0, bk, wv);
        for (std::size_t i = 0; i < m; ++i) z[i] -= vwv[i];
        return z;
      };
      break;
    }
  }
  return build(a, layout, region, scheme, col, row);
}

namespace {

struct BlockView {
  std::size_t bi, bj, r0, r1, c0, c1;
};

bool ratio_index(double dw, double dp, std::size_t extent, std::size_t& index) {
  if (dp == 0.0) return false;
  const double ratio = dw / dp;
  const double nearest = std::round(ratio);
  if (!(std::abs(ratio - nearest) <= 1e-6 * std::max(1.0, std::abs(nearest)))) return false;
  if (nearest < 1.0 || nearest > static_cast<double>(extent)) return false;
  index = static_cast<std::size_t>(nearest) - 1;
  return true;
}

struct Mismatch {
  std::vector<std::size_t> cols;  // absolute column indices
  std::vector<double> col_dp, col_dw;
  std::vector<std::size_t> rows;  // absolute row indices (full scheme)
  std::vector<double> row_dp, row_dw;
};

Mismatch find_mismatch(const DenseMatrix& m, const BlockChecksums& s, const BlockView& v,
                       double tol_p, double tol_w) {
  Mismatch mm;
  const std::size_t I = v.bi - s.region.row_begin;
  const std::size_t J = v.bj - s.region.col_begin;
  for (std::size_t j = v.c0; j < v.c1; ++j) {
    double p = 0.0, w = 0.0;
    for (std::size_t i = v.r0; i < v.r1; ++i) {
      p += m(i, j);
      w += static_cast<double>(i - v.r0 + 1) * m(i, j);
    }
    const double dp = s.col_plain[I][j - s.col_begin] - p;
    const double dw = s.col_weighted[I][j - s.col_begin] - w;
    if (!(std::abs(dp) <= tol_p) || !(std::abs(dw) <= tol_w)) {
      mm.cols.push_back(j);
      mm.col_dp.push_back(dp);
      mm.col_dw.push_back(dw);
    }
  }
  if (s.scheme == ChecksumScheme::Full) {
    for (std::size_t i = v.r0; i < v.r1; ++i) {
      double p = 0.0, w = 0.0;
      for (std::size_t j = v.c0; j < v.c1; ++j) {
        p += m(i, j);
        w += static_cast<double>(j - v.c0 + 1) * m(i, j);
      }
      const double dp = s.row_plain[J][i - s.row_begin] - p;
      const double dw = s.row_weighted[J][i - s.row_begin] - w;
      if (!(std::abs(dp) <= tol_p) || !(std::abs(dw) <= tol_w)) {
        mm.rows.push_back(i);
        mm.row_dp.push_back(dp);
        mm.row_dw.push_back(dw);
      }
    }
  }
  return mm;
}

// Common row pointed to by every mismatched column's weighted ratio.
bool common_row(const Mismatch& mm, const BlockView& v, std::size_t& row) {
  if (mm.cols.empty()) return false;
  for (std::size_t c = 0; c < mm.cols.size(); ++c) {
    std::size_t idx = 0;
    if (!ratio_index(mm.col_dw[c], mm.col_dp[c], v.r1 - v.r0, idx)) return false;
    if (c == 0) row = v.r0 + idx;
    else if (v.r0 + idx != row) return false;
  }
  return true;
}

bool rows_point_to(const Mismatch& mm, const BlockView& v, std::size_t col) {
  for (std::size_t r = 0; r < mm.rows.size(); ++r) {
    std::size_t idx = 0;
    if (!ratio_index(mm.row_dw[r], mm.row_dp[r], v.c1 - v.c0, idx)) return false;
    if (v.c0 + idx != col) return false;
  }
  return true;
}

}  // namespace

CorrectionReport verify_correct(DenseMatrix& m, const BlockLayout& layout,
                                const BlockChecksums& s, double tau_check) {
  CorrectionReport report;
  if (s.scheme == ChecksumScheme::None || s.region.empty()) return report;
  if (s.col_plain.size() != s.region.row_end - s.region.row_begin)
    throw InvalidArgument("verify_correct: checksum set does not match its region");
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const std::size_t nbc = s.region.col_end - s.region.col_begin;

  for (std::size_t bi = s.region.row_begin; bi < s.region.row_end; ++bi) {
    for (std::size_t bj = s.region.col_begin; bj < s.region.col_end; ++bj) {
      const BlockView v{bi, bj, layout.begin(bi), layout.end(bi), layout.begin(bj),
                        layout.end(bj)};
      const double extent = static_cast<double>(std::max(v.r1 - v.r0, v.c1 - v.c0));
      const double ref =
          (bi - s.region.row_begin) * nbc + (bj - s.region.col_begin) < s.scale.size()
              ? s.scale[(bi - s.region.row_begin) * nbc + (bj - s.region.col_begin)]
              : 0.0;
      auto tolerances = [&](double& tp, double& tw) {
        const double scale = std::max({ref, block_max(m, layout, bi, bj),
                                       std::numeric_limits<double>::min()});
        tp = tau_check * eps * extent * scale;
        tw = tp * extent;
      };
      double tol_p = 0, tol_w = 0;
      tolerances(tol_p, tol_w);
      Mismatch mm = find_mismatch(m, s, v, tol_p, tol_w);
      if (mm.cols.empty() && mm.rows.empty()) continue;

      const bool full = s.scheme == ChecksumScheme::Full;
      std::size_t row = 0;
      const bool row_pattern = common_row(mm, v, row);
      ErrorKind kind = ErrorKind::D2;
      bool attempt = false;
      std::vector<std::pair<std::size_t, std::size_t>> cells;
      std::vector<double> deltas;

      if (!full) {
        if (mm.cols.size() == 1) {
          kind = row_pattern ? ErrorKind::D0 : ErrorKind::D1;
          attempt = row_pattern;
        } else {
          kind = row_pattern ? ErrorKind::D1 : ErrorKind::D2;
        }
        if (attempt) {
          cells.emplace_back(row, mm.cols[0]);
          deltas.push_back(mm.col_dp[0]);
        }
      } else {
        const bool rows_ok =
            mm.rows.size() <= 1 && (mm.rows.empty() || mm.rows[0] == row);
        if (row_pattern && rows_ok) {
          kind = mm.cols.size() == 1 ? ErrorKind::D0 : ErrorKind::D1;
          attempt = true;
          for (std::size_t c = 0; c < mm.cols.size(); ++c) {
            cells.emplace_back(row, mm.cols[c]);
            deltas.push_back(mm.col_dp[c]);
          }
        } else if (mm.cols.size() == 1 && !mm.rows.empty() && rows_point_to(mm, v, mm.cols[0])) {
          kind = mm.rows.size() == 1 ? ErrorKind::D0 : ErrorKind::D1;
          attempt = true;
          for (std::size_t r = 0; r < mm.rows.size(); ++r) {
            cells.emplace_back(mm.rows[r], mm.cols[0]);
            deltas.push_back(mm.row_dp[r]);
          }
        }
      }

      ++report.detected[index(kind)];
      bool fixed = false;
      if (attempt) {
        for (std::size_t c = 0; c < cells.size(); ++c)
          m(cells[c].first, cells[c].second) += deltas[c];
        tolerances(tol_p, tol_w);
        const Mismatch after = find_mismatch(m, s, v, tol_p, tol_w);
        fixed = after.cols.empty() && after.rows.empty();
      }
      if (fixed) ++report.corrected[index(kind)];
      else report.uncorrectable = true;
      report.locations.push_back({bi, bj, kind, fixed});
    }
  }
  return report;
}

CorrectionReport verify_correct(FactorizationState& state, const BlockChecksums& sums,
                                double tau_check) {
  return verify_correct(state.a, state.layout, sums, tau_check);
}

void inject_faults(DenseMatrix& m, const BlockLayout& layout,
                   const std::vector<InjectedFault>& plan) {
  for (const InjectedFault& f : plan) {
    if (f.block_row >= layout.n_blocks() || f.block_col >= layout.n_blocks())
      throw InvalidArgument("fault block coordinates out of range");
    if (f.height == 0 || f.width == 0 || f.row_offset + f.height > layout.size(f.block_row) ||
        f.col_offset + f.width > layout.size(f.block_col))
      throw InvalidArgument("fault patch exceeds its block");
    if (f.magnitudes.size() != f.height * f.width)
      throw InvalidArgument("fault magnitude count does not match its patch");
  }
  for (const InjectedFault& f : plan) {
    const std::size_t r0 = layout.begin(f.block_row) + f.row_offset;
    const std::size_t c0 = layout.begin(f.block_col) + f.col_offset;
    for (std::size_t j = 0; j < f.width; ++j)
      for (std::size_t i = 0; i < f.height; ++i) m(r0 + i, c0 + j) += f.magnitudes[j * f.height + i];
  }
}

void inject_faults(FactorizationState& state, const std::vector<InjectedFault>& plan) {
  inject_faults(state.a, state.layout, plan);
}

InjectedFault random_fault(ErrorKind kind, const BlockLayout& layout, const BlockRegion& region,
                           double magnitude, std::mt19937_64& rng, std::size_t iteration,
                           TaskKind task) {
  if (region.empty()) throw InvalidArgument("random_fault: empty region");
  auto pick = [&rng](std::size_t count) {
    return std::uniform_int_distribution<std::size_t>(0, count - 1)(rng);
  };
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  InjectedFault f;
  f.kind = kind;
  f.iteration = iteration;
  f.task = task;
  f.block_row = region.row_begin + pick(region.row_end - region.row_begin);
  f.block_col = region.col_begin + pick(region.col_end - region.col_begin);
  const std::size_t hs = layout.size(f.block_row);
  const std::size_t ws = layout.size(f.block_col);
  switch (kind) {
    case ErrorKind::D0:
      f.row_offset = pick(hs);
      f.col_offset = pick(ws);
      break;
    case ErrorKind::D1:
      if (pick(2) == 0) {
        f.row_offset = pick(hs);
        f.width = ws;
      } else {
        f.col_offset = pick(ws);
        f.height = hs;
      }
      break;
    case ErrorKind::D2: {
      f.height = hs < 2 ? hs : 2 + pick(hs - 1);
      f.width = ws < 2 ? ws : 2 + pick(ws - 1);
      f.row_offset = pick(hs - f.height + 1);
      f.col_offset = pick(ws - f.width + 1);
      break;
    }
  }
  f.magnitudes.resize(f.height * f.width);
  for (double& x : f.magnitudes) {
    const double mag = magnitude * (0.5 + unit(rng));
    x = pick(2) == 0 ? mag : -mag;
  }
  return f;
}

CorrectionReport protected_task(FactorizationState& state, TaskKind task, std::size_t k,
                                ChecksumScheme scheme, const std::vector<InjectedFault>& faults,
                                double tau_check) {
  const bool protect = scheme != ChecksumScheme::None && task != TaskKind::PD &&
                       task != TaskKind::Transfer;
  BlockChecksums expected;
  if (protect) expected = maintain(state, task, k, scheme);
  linalg::run_task(state, task, k);
  inject_faults(state, faults);
  if (!protect) return {};
  return verify_correct(state, expected, tau_check);
}

}  // namespace slackwise::abft
