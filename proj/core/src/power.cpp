#include "slackwise/power.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace slackwise::power {

void ProcessorModel::validate() const {
  const std::string who = name.empty() ? std::string("processor") : name;
  if (step <= 0) throw InvalidArgument(who + ": grid step must be positive");
  if (!(f_min > 0 && f_min <= f_base && f_base <= f_max))
    throw InvalidArgument(who + ": need 0 < f_min <= f_base <= f_max");
  if (f_min % step != 0 || f_base % step != 0 || f_max % step != 0)
    throw InvalidArgument(who + ": frequencies must lie on the grid");
  if (!(p_total > 0)) throw InvalidArgument(who + ": p_total must be positive");
  if (!(d > 0 && d < 1)) throw InvalidArgument(who + ": d must be in (0, 1)");
  if (!(dvfs_latency_s >= 0)) throw InvalidArgument(who + ": DVFS latency must be >= 0");
  if (!(gamma > 0)) throw InvalidArgument(who + ": gamma must be positive");
  if (alpha_curve.empty()) throw InvalidArgument(who + ": alpha curve is empty");
  for (std::size_t i = 0; i < alpha_curve.size(); ++i) {
    if (!(alpha_curve[i].alpha > 0 && alpha_curve[i].alpha <= 1))
      throw InvalidArgument(who + ": alpha must be in (0, 1]");
    if (i > 0 && !(alpha_curve[i].f_mhz > alpha_curve[i - 1].f_mhz))
      throw InvalidArgument(who + ": alpha curve frequencies must increase");
  }
  for (double r : task_rate)
    if (!(r >= 0)) throw InvalidArgument(who + ": task rates must be >= 0");
  if (!(checksum_rate > 0)) throw InvalidArgument(who + ": checksum rate must be positive");
}

double ProcessorModel::alpha(double f, Guardband gb) const {
  if (gb == Guardband::Default) return 1.0;
  const auto& c = alpha_curve;
  if (f <= c.front().f_mhz) return c.front().alpha;
  if (f >= c.back().f_mhz) return c.back().alpha;
  const auto hi = std::upper_bound(c.begin(), c.end(), f,
                                   [](double x, const AlphaPoint& p) { return x < p.f_mhz; });
  const auto lo = hi - 1;
  const double t = (f - lo->f_mhz) / (hi->f_mhz - lo->f_mhz);
  return lo->alpha + t * (hi->alpha - lo->alpha);
}

double ProcessorModel::dynamic_power(double f, Guardband gb) const {
  return alpha(f, gb) * d * p_total * std::pow(f / static_cast<double>(f_base), gamma);
}

double ProcessorModel::static_power(double f, Guardband gb) const {
  return alpha(f, gb) * (1 - d) * p_total;
}

std::vector<Mhz> ProcessorModel::grid() const {
  std::vector<Mhz> g;
  for (Mhz f = f_min; f <= f_max; f += step) g.push_back(f);
  return g;
}

Mhz ProcessorModel::clamp(Mhz f) const { return std::clamp(f, f_min, f_max); }

bool ProcessorModel::on_grid(Mhz f) const {
  return f >= f_min && f <= f_max && (f - f_min) % step == 0;
}

ProcessorModel ProcessorModel::default_cpu() {
  ProcessorModel m;
  m.name = "cpu";
  m.f_base = 3500;
  m.f_min = 800;
  m.f_max = 4500;
  m.p_total = 95;
  m.d = 0.7;
  m.alpha_curve = {{0, 0.92}};
  m.dvfs_latency_s = 50e-6;
  m.task_rate[index(TaskKind::PD)] = 20e9;
  m.checksum_rate = 5e9;
  return m;
}

ProcessorModel ProcessorModel::default_gpu() {
  ProcessorModel m;
  m.name = "gpu";
  m.f_base = 1300;
  m.f_min = 300;
  m.f_max = 2200;
  m.p_total = 250;
  m.d = 0.75;
  m.alpha_curve = {{0, 0.9}};
  m.dvfs_latency_s = 1e-3;
  m.task_rate[index(TaskKind::PU)] = 300e9;
  m.task_rate[index(TaskKind::TMU)] = 450e9;
  m.checksum_rate = 54e9;
  return m;
}

double task_time_at(double t_base, double f, double f_base) {
  if (!(f > 0)) throw InvalidArgument("task_time_at: frequency must be positive");
  return t_base * f_base / f;
}

EnergySplit task_energy(const ProcessorModel& m, double f, Guardband gb, double duration) {
  if (!(duration >= 0)) throw InvalidArgument("task_energy: duration must be >= 0");
  return {m.dynamic_power(f, gb) * duration, m.static_power(f, gb) * duration};
}

double idle_energy(const ProcessorModel& m, double f, Guardband gb, double duration) {
  if (!(duration >= 0)) throw InvalidArgument("idle_energy: duration must be >= 0");
  return m.idle_power(f, gb) * duration;
}

namespace {

// Saving of a processor whose busy time changes from t to t_new, moving from
// f_base / default guardband to the optimized guardband at the matching clock.
double saving(const ProcessorModel& m, double t, double t_new) {
  if (t == 0) return 0;
  const double f_new = static_cast<double>(m.f_base) * t / t_new;
  const double a = m.alpha(f_new, Guardband::Optimized);
  const double dyn = (1 - a * std::pow(t / t_new, m.gamma - 1)) * m.d * m.p_total * t;
  const double stat = (t - a * t_new) * (1 - m.d) * m.p_total;
  return dyn + stat;
}

}  // namespace

DeltaE delta_e(const ProcessorModel& cpu, const ProcessorModel& gpu, double t_cpu, double t_gpu,
               double slack, double r, SlackSide side) {
  if (!(r >= 0 && r <= 1)) throw InvalidArgument("delta_e: r must be in [0, 1]");
  if (!(slack >= 0)) throw InvalidArgument("delta_e: slack must be >= 0");
  if (!(t_cpu >= 0 && t_gpu >= 0)) throw InvalidArgument("delta_e: times must be >= 0");
  const double stretch = slack * (1 - r);
  const double shrink = slack * r;
  if (side == SlackSide::Cpu) {
    if (!(t_gpu - shrink > 0)) throw InvalidArgument("delta_e: critical time would vanish");
    return {saving(cpu, t_cpu, t_cpu + stretch), saving(gpu, t_gpu, t_gpu - shrink)};
  }
  if (!(t_cpu - shrink > 0)) throw InvalidArgument("delta_e: critical time would vanish");
  return {saving(cpu, t_cpu, t_cpu - shrink), saving(gpu, t_gpu, t_gpu + stretch)};
}

BreakEven solve_break_even_r(const ProcessorModel& cpu, const ProcessorModel& gpu, double t_cpu,
                             double t_gpu, double slack, SlackSide side) {
  if (!(slack > 0)) throw InvalidArgument("solve_break_even_r: slack must be positive");
  auto g = [&](double r) { return delta_e(cpu, gpu, t_cpu, t_gpu, slack, r, side).total(); };
  const double tol = 1e-9 * std::max(cpu.p_total * t_cpu, gpu.p_total * t_gpu);

  // Bracket the first sign change on a coarse scan.
  constexpr int kScan = 64;
  double lo = 0, glo = g(0);
  if (std::abs(glo) <= tol) return {0, BreakEvenStatus::Root};
  bool bracketed = false;
  double hi = 0, ghi = 0;
  bool any_positive = glo > 0, any_negative = glo < 0;
  for (int i = 1; i <= kScan; ++i) {
    const double r = static_cast<double>(i) / kScan;
    const double gr = g(r);
    any_positive = any_positive || gr > 0;
    any_negative = any_negative || gr < 0;
    if (!bracketed && ((glo > 0) != (gr > 0) || std::abs(gr) <= tol)) {
      hi = r;
      ghi = gr;
      bracketed = true;
      break;
    }
    lo = r;
    glo = gr;
  }
  if (!bracketed) {
    return any_negative && !any_positive ? BreakEven{0, BreakEvenStatus::AllNegative}
                                         : BreakEven{1, BreakEvenStatus::AllPositive};
  }
  if (std::abs(ghi) <= tol) return {hi, BreakEvenStatus::Root};

  // Newton from the bracket midpoint; any step leaving the bracket or failing
  // to shrink |g| falls back to bisection.
  double r = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double gr = g(r);
    if (std::abs(gr) <= tol) return {r, BreakEvenStatus::Root};
    if ((gr > 0) == (glo > 0)) {
      lo = r;
      glo = gr;
    } else {
      hi = r;
    }
    const double h = 1e-7 * std::max(1e-3, hi - lo);
    const double a = std::max(0.0, r - h), b = std::min(1.0, r + h);
    const double deriv = (g(b) - g(a)) / (b - a);
    double next = deriv != 0 && std::isfinite(deriv) ? r - gr / deriv : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    r = next;
    if (hi - lo < 1e-15) break;
  }
  return {r, BreakEvenStatus::Root};
}

double peak_efficiency(const ProcessorModel& m, double speedup) {
  // Scan the range at 1 MHz and add the unconstrained optimum of
  // f / P(f), so off-grid clocks are covered as well.
  std::vector<double> freqs;
  for (double f = m.f_min; f <= m.f_max; f += 1.0) freqs.push_back(f);
  freqs.push_back(m.f_base * std::pow((1 - m.d) / (m.d * (m.gamma - 1)), 1 / m.gamma));
  double best_rate = m.checksum_rate;
  for (double rate : m.task_rate) best_rate = std::max(best_rate, rate);
  double best = 0;
  for (double f : freqs)
    for (Guardband gb : {Guardband::Default, Guardband::Optimized})
      best = std::max(best, best_rate * f / m.f_base * speedup / m.total_power(f, gb));
  return best;
}

double theoretical_min_energy(double w_cpu, double w_gpu, double k_cpu_max, double k_gpu_max) {
  if (!(k_cpu_max > 0 && k_gpu_max > 0))
    throw InvalidArgument("theoretical_min_energy: efficiencies must be positive");
  return w_cpu / k_cpu_max + w_gpu / k_gpu_max;
}

}  // namespace slackwise::power
