#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "slackwise/types.hpp"

namespace slackwise::coverage {

struct Breakpoint {
  double f_mhz = 0;
  double rate = 0;  // errors per second
};

/// λ(f, kind) as piecewise-linear curves, one per error kind. Values outside
/// the breakpoint span clamp to the nearest end point; an empty curve is
/// identically zero.
class ErrorRateTable {
 public:
  ErrorRateTable() = default;
  explicit ErrorRateTable(std::array<std::vector<Breakpoint>, 3> curves);

  /// All rates zero everywhere.
  static ErrorRateTable zero() { return {}; }
  /// Linear ramps from 0 at f_safe to the given rates at f_top.
  static ErrorRateTable ramp(double f_safe, double f_top, double r0, double r1, double r2);
  /// Default GPU table: fault-free up to 1800 MHz, rising to 2200 MHz.
  static ErrorRateTable default_gpu();

  double rate(double f_mhz, ErrorKind kind) const;
  bool fault_free(double f_mhz) const;
  bool all_zero() const;
  const std::vector<Breakpoint>& curve(ErrorKind kind) const { return curves_[index(kind)]; }

 private:
  std::array<std::vector<Breakpoint>, 3> curves_;
};

inline double error_rate(const ErrorRateTable& t, double f_mhz, ErrorKind kind) {
  return t.rate(f_mhz, kind);
}

inline constexpr double kFullCoverage = 0.999999;

struct CoverageParams {
  /// Tolerable-fault slots S: blocks checked in one detection interval.
  std::size_t slots = 1;
  double fc_desired = kFullCoverage;
  double full_coverage_threshold = kFullCoverage;
};

double poisson_pmf(std::size_t k, double mean);
/// P(X <= k) summed directly from the lower terms.
double poisson_cdf(std::size_t k, double mean);
/// P(X > k) summed directly from the upper tail, accurate when it is tiny.
double poisson_sf(std::size_t k, double mean);

/// Probability that k faults land in k distinct slots out of S.
double distinct_slot_probability(std::size_t k, std::size_t slots);

/// Coverage from expected fault counts m_i = λ_i T.
double fc_single_means(std::size_t slots, double m0, double m1, double m2);
double fc_full_means(std::size_t slots, double m0, double m1, double m2);

double fc_single(const ErrorRateTable& table, const CoverageParams& params, double f_mhz,
                 double seconds);
double fc_full(const ErrorRateTable& table, const CoverageParams& params, double f_mhz,
               double seconds);
double fault_coverage(ChecksumScheme scheme, const ErrorRateTable& table,
                      const CoverageParams& params, double f_mhz, double seconds);

struct FrequencyGrid {
  Mhz f_min = 0;
  Mhz f_max = 0;
  Mhz step = kGridStepMhz;
};

struct FMaxResult {
  Mhz f = 0;
  bool feasible = false;
};

/// Largest grid frequency at which the scheme's per-kind Poisson bounds hold
/// with the given probabilities over an operation of `seconds`.
FMaxResult f_max(ChecksumScheme scheme, const CoverageParams& params, const ErrorRateTable& table,
                 const FrequencyGrid& grid, double seconds, double p0, double p1, double p2);

struct AbftDecision {
  Mhz f = 0;
  bool single_check = false;
  bool full_check = false;
  /// False when no grid frequency down to the floor reached the desired
  /// coverage; f is then the floor and full_check is set.
  bool feasible = true;

  ChecksumScheme scheme() const {
    return full_check ? ChecksumScheme::Full
                      : (single_check ? ChecksumScheme::SingleSide : ChecksumScheme::None);
  }
};

/// Adaptive ABFT: lowers f_desired in grid steps until the error rates vanish
/// or a checksum scheme (single-side first) reaches FC_desired over the
/// projected time t_base * f_base / f. Stops at f_floor.
AbftDecision adaptive_abft(const CoverageParams& params, const ErrorRateTable& table,
                           Mhz f_desired, Mhz f_base, double t_base, Mhz f_floor,
                           Mhz step = kGridStepMhz);

}  // namespace slackwise::coverage
