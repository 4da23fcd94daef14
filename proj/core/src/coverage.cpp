#include "slackwise/coverage.hpp"

#include <algorithm>
#include <cmath>

namespace slackwise::coverage {

namespace {

constexpr double kNegligible = 1e-18;

double log_pmf(std::size_t k, double mean) {
  const double dk = static_cast<double>(k);
  return dk * std::log(mean) - mean - std::lgamma(dk + 1.0);
}

double log_slots(std::size_t k, std::size_t slots) {
  double acc = 0.0;
  const double s = static_cast<double>(slots);
  for (std::size_t i = 1; i < k; ++i) acc += std::log1p(-static_cast<double>(i) / s);
  return acc;
}

}  // namespace

ErrorRateTable::ErrorRateTable(std::array<std::vector<Breakpoint>, 3> curves)
    : curves_(std::move(curves)) {
  for (const auto& c : curves_) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (!(c[i].rate >= 0.0) || !std::isfinite(c[i].rate))
        throw InvalidArgument("error rates must be finite and non-negative");
      if (i > 0 && !(c[i].f_mhz > c[i - 1].f_mhz))
        throw InvalidArgument("error-rate breakpoints must have increasing frequencies");
      if (i > 0 && c[i].rate < c[i - 1].rate)
        throw InvalidArgument("error rates must be non-decreasing in frequency");
    }
  }
}

ErrorRateTable ErrorRateTable::ramp(double f_safe, double f_top, double r0, double r1,
                                    double r2) {
  auto curve = [&](double r) {
    return r > 0 ? std::vector<Breakpoint>{{f_safe, 0.0}, {f_top, r}} : std::vector<Breakpoint>{};
  };
  return ErrorRateTable({curve(r0), curve(r1), curve(r2)});
}

ErrorRateTable ErrorRateTable::default_gpu() {
  // Fault-free through 1800 MHz; 1D rates sized so a seconds-long trailing
  // update keeps single-side coverage near 99.9% at 2000 MHz and ~96% at
  // 2200 MHz.
  return ErrorRateTable({
      std::vector<Breakpoint>{{1800, 0}, {1900, 1e-3}, {2000, 1e-2}, {2100, 3e-2}, {2200, 4e-2}},
      std::vector<Breakpoint>{{1800, 0}, {1900, 5e-7}, {2000, 1.24e-3}, {2100, 2.34e-2}, {2200, 3.51e-2}},
      std::vector<Breakpoint>{{1800, 0}, {2200, 2e-7}},
  });
}

double ErrorRateTable::rate(double f, ErrorKind kind) const {
  const auto& c = curves_[index(kind)];
  if (c.empty()) return 0.0;
  if (f <= c.front().f_mhz) return c.front().rate;
  if (f >= c.back().f_mhz) return c.back().rate;
  const auto hi = std::upper_bound(c.begin(), c.end(), f,
                                   [](double x, const Breakpoint& b) { return x < b.f_mhz; });
  const auto lo = hi - 1;
  const double t = (f - lo->f_mhz) / (hi->f_mhz - lo->f_mhz);
  return lo->rate + t * (hi->rate - lo->rate);
}

bool ErrorRateTable::fault_free(double f) const {
  return std::all_of(kErrorKinds.begin(), kErrorKinds.end(),
                     [&](ErrorKind k) { return rate(f, k) == 0.0; });
}

bool ErrorRateTable::all_zero() const {
  for (const auto& c : curves_)
    for (const auto& b : c)
      if (b.rate != 0.0) return false;
  return true;
}

double poisson_pmf(std::size_t k, double mean) {
  if (mean < 0) throw InvalidArgument("Poisson mean must be non-negative");
  if (mean == 0) return k == 0 ? 1.0 : 0.0;
  return std::exp(log_pmf(k, mean));
}

double poisson_cdf(std::size_t k, double mean) {
  if (mean < 0) throw InvalidArgument("Poisson mean must be non-negative");
  if (mean == 0) return 1.0;
  double term = std::exp(-mean);
  double sum = term;
  for (std::size_t i = 1; i <= k; ++i) {
    term *= mean / static_cast<double>(i);
    sum += term;
    if (static_cast<double>(i) > mean && term < kNegligible * sum) break;
  }
  return std::min(sum, 1.0);
}

double poisson_sf(std::size_t k, double mean) {
  if (mean < 0) throw InvalidArgument("Poisson mean must be non-negative");
  if (mean == 0) return 0.0;
  if (static_cast<double>(k) < mean) return std::max(0.0, 1.0 - poisson_cdf(k, mean));
  double term = std::exp(log_pmf(k + 1, mean));
  double sum = term;
  for (std::size_t i = k + 2; term > kNegligible * sum; ++i) {
    term *= mean / static_cast<double>(i);
    sum += term;
  }
  return std::min(sum, 1.0);
}

double distinct_slot_probability(std::size_t k, std::size_t slots) {
  if (k > slots) return 0.0;
  return std::exp(log_slots(k, slots));
}

double fc_single_means(std::size_t slots, double m0, double m1, double m2) {
  if (slots == 0) throw InvalidArgument("coverage needs at least one slot");
  if (m0 < 0 || m1 < 0 || m2 < 0) throw InvalidArgument("expected fault counts must be >= 0");
  double sum = 0.0;
  if (m0 == 0) {
    sum = 1.0;
  } else {
    double slot = 0.0;  // log of the distinct-slot probability
    for (std::size_t k = 0; k <= slots; ++k) {
      if (k >= 2) slot += std::log1p(-static_cast<double>(k - 1) / static_cast<double>(slots));
      const double term = std::exp(log_pmf(k, m0) + slot);
      sum += term;
      if (static_cast<double>(k) > m0 && term < kNegligible * sum) break;
    }
  }
  return std::clamp(sum * std::exp(-m1) * std::exp(-m2), 0.0, 1.0);
}

double fc_full_means(std::size_t slots, double m0, double m1, double m2) {
  if (slots == 0) throw InvalidArgument("coverage needs at least one slot");
  if (m0 < 0 || m1 < 0 || m2 < 0) throw InvalidArgument("expected fault counts must be >= 0");
  std::vector<double> log_slot(slots + 1, 0.0);
  for (std::size_t t = 2; t <= slots; ++t)
    log_slot[t] = log_slot[t - 1] + std::log1p(-static_cast<double>(t - 1) / static_cast<double>(slots));
  auto lp = [](std::size_t k, double m) {
    return m == 0 ? (k == 0 ? 0.0 : -INFINITY) : log_pmf(k, m);
  };
  double sum = 0.0;
  for (std::size_t k = 0; k <= slots; ++k) {
    const double lk = lp(k, m0);
    if (lk == -INFINITY) break;
    double inner = 0.0;
    for (std::size_t j = 0; j <= slots - k; ++j) {
      const double lj = lp(j, m1);
      if (lj == -INFINITY) break;
      const double term = std::exp(lk + lj + log_slot[k + j]);
      inner += term;
      if (static_cast<double>(j) > m1 && term < kNegligible * (sum + inner)) break;
    }
    sum += inner;
    if (static_cast<double>(k) > m0 && inner < kNegligible * sum) break;
  }
  return std::clamp(sum * std::exp(-m2), 0.0, 1.0);
}

double fc_single(const ErrorRateTable& t, const CoverageParams& p, double f, double seconds) {
  if (!(seconds >= 0)) throw InvalidArgument("coverage time must be non-negative");
  return fc_single_means(p.slots, t.rate(f, ErrorKind::D0) * seconds,
                         t.rate(f, ErrorKind::D1) * seconds, t.rate(f, ErrorKind::D2) * seconds);
}

double fc_full(const ErrorRateTable& t, const CoverageParams& p, double f, double seconds) {
  if (!(seconds >= 0)) throw InvalidArgument("coverage time must be non-negative");
  return fc_full_means(p.slots, t.rate(f, ErrorKind::D0) * seconds,
                       t.rate(f, ErrorKind::D1) * seconds, t.rate(f, ErrorKind::D2) * seconds);
}

double fault_coverage(ChecksumScheme scheme, const ErrorRateTable& t, const CoverageParams& p,
                      double f, double seconds) {
  switch (scheme) {
    case ChecksumScheme::SingleSide: return fc_single(t, p, f, seconds);
    case ChecksumScheme::Full: return fc_full(t, p, f, seconds);
    case ChecksumScheme::None: break;
  }
  // Without checksums any fault goes uncorrected.
  double m = 0;
  for (ErrorKind k : kErrorKinds) m += t.rate(f, k) * seconds;
  return std::exp(-m);
}

FMaxResult f_max(ChecksumScheme scheme, const CoverageParams& params, const ErrorRateTable& table,
                 const FrequencyGrid& grid, double seconds, double p0, double p1, double p2) {
  for (double p : {p0, p1, p2})
    if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("f_max probabilities must be in (0, 1]");
  if (grid.step <= 0 || grid.f_max < grid.f_min) throw InvalidArgument("invalid frequency grid");
  // Compare upper tails against 1 - p so that p = 1 admits only zero rates.
  auto holds = [&](std::size_t bound, double mean, double p) {
    const double tail = bound == 0 ? -std::expm1(-mean) : poisson_sf(bound, mean);
    return tail <= 1.0 - p;
  };
  const std::size_t s = params.slots;
  for (Mhz f = grid.f_max; f >= grid.f_min; f -= grid.step) {
    const double m0 = table.rate(f, ErrorKind::D0) * seconds;
    const double m1 = table.rate(f, ErrorKind::D1) * seconds;
    const double m2 = table.rate(f, ErrorKind::D2) * seconds;
    const std::size_t bound1 = scheme == ChecksumScheme::Full ? s : 0;
    const std::size_t bound0 = scheme == ChecksumScheme::None ? 0 : s;
    if (holds(bound0, m0, p0) && holds(bound1, m1, p1) && holds(0, m2, p2)) return {f, true};
  }
  return {grid.f_min, false};
}

AbftDecision adaptive_abft(const CoverageParams& params, const ErrorRateTable& table,
                           Mhz f_desired, Mhz f_base, double t_base, Mhz f_floor, Mhz step) {
  if (f_desired <= 0 || f_base <= 0 || step <= 0)
    throw InvalidArgument("adaptive_abft: frequencies must be positive");
  AbftDecision d{f_desired, false, false, true};
  while (!table.fault_free(d.f)) {
    const double projected = t_base * static_cast<double>(f_base) / static_cast<double>(d.f);
    if (fc_single(table, params, d.f, projected) >= params.fc_desired) {
      d.single_check = true;
      return d;
    }
    if (fc_full(table, params, d.f, projected) >= params.fc_desired) {
      d.full_check = true;
      return d;
    }
    if (d.f - step < f_floor) {
      d.full_check = true;
      d.feasible = false;
      return d;
    }
    d.f -= step;
  }
  return d;
}

}  // namespace slackwise::coverage
