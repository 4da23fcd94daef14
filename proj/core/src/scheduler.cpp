#include "slackwise/scheduler.hpp"

#include <algorithm>
#include <cmath>

namespace slackwise::scheduler {

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::Original: return "original";
    case Mode::R2H: return "r2h";
    case Mode::SR: return "sr";
    case Mode::BSR: return "bsr";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view s) {
  if (s == "original") return Mode::Original;
  if (s == "r2h" || s == "h2r" || s == "race-to-halt") return Mode::R2H;
  if (s == "sr") return Mode::SR;
  if (s == "bsr") return Mode::BSR;
  return std::nullopt;
}

Mhz roundup(double value, Mhz step) {
  const double q = value / static_cast<double>(step);
  return static_cast<Mhz>(std::ceil(q - 1e-9)) * step;
}

namespace {

struct GpuChoice {
  Mhz f;
  coverage::AbftDecision abft;
};

double checksum_time(const IterationForecast& fc, ChecksumScheme s) {
  switch (s) {
    case ChecksumScheme::SingleSide: return fc.gpu_checksum_single;
    case ChecksumScheme::Full: return fc.gpu_checksum_full;
    case ChecksumScheme::None: break;
  }
  return 0;
}

// Runs the adaptive ABFT governor and, when it lands above base, picks the
// grid frequency in [f_base, governor result] with the shortest projected GPU
// time once checksum work and a DVFS transition are included.
GpuChoice protect_gpu(const power::ProcessorModel& gpu, const IterationForecast& fc, Mhz f,
                      Mhz prev, const AbftContext& ctx) {
  const double t = fc.t_gpu.value_or(0.0);
  const coverage::AbftDecision top =
      coverage::adaptive_abft(ctx.params, *ctx.table, f, gpu.f_base, t, gpu.f_min, gpu.step);
  if (top.f <= gpu.f_base || !fc.t_gpu) return {top.f, top};
  GpuChoice best{top.f, top};
  double best_cost = INFINITY;
  for (Mhz cand = gpu.f_base; cand <= top.f; cand += gpu.step) {
    const coverage::AbftDecision a =
        coverage::adaptive_abft(ctx.params, *ctx.table, cand, gpu.f_base, t, gpu.f_min, gpu.step);
    if (a.f != cand) continue;
    const double cost = power::task_time_at(t + checksum_time(fc, a.scheme()), cand, gpu.f_base) +
                        (cand != prev ? gpu.dvfs_latency_s : 0.0);
    if (cost < best_cost) {
      best_cost = cost;
      best = {cand, a};
    }
  }
  return best;
}

Mhz frequency_for(const power::ProcessorModel& m, double t_pred, double t_desired) {
  if (!(t_desired > 0)) return m.f_max;
  return m.clamp(roundup(static_cast<double>(m.f_base) * (t_pred / t_desired), m.step));
}

}  // namespace

ScheduleDecision bsr_decide(double r, const power::ProcessorModel& cpu,
                            const power::ProcessorModel& gpu, const IterationForecast& fc,
                            Mhz prev_cpu, Mhz prev_gpu, const AbftContext& abft) {
  if (!(r >= 0 && r <= 1)) throw InvalidArgument("reclamation ratio must be in [0, 1]");
  ScheduleDecision d;
  d.f_cpu = prev_cpu;
  d.f_gpu = prev_gpu;
  const bool have_cpu = fc.t_cpu && *fc.t_cpu > 0;
  const bool have_gpu = fc.t_gpu && *fc.t_gpu > 0;

  if (have_cpu && have_gpu) {
    const double tc = *fc.t_cpu, tg = *fc.t_gpu, ttr = fc.t_transfer;
    const double slack = tg - tc - ttr;
    double tg_des = 0, tc_des = 0;
    bool gpu_critical = slack > 0;
    if (gpu_critical) {
      const double gain = slack * r;
      tg_des = tg - gain - (gain > 0 ? gpu.dvfs_latency_s : 0.0);
      tc_des = tg_des - cpu.dvfs_latency_s - ttr;
    } else {
      const double gain = -slack * r;
      tc_des = tc - gain - (gain > 0 ? cpu.dvfs_latency_s : 0.0);
      tg_des = tc_des - gpu.dvfs_latency_s + ttr;
    }
    Mhz fg = frequency_for(gpu, tg, tg_des);
    Mhz fcpu = frequency_for(cpu, tc, tc_des);
    // The non-critical side only ever slows down.
    if (gpu_critical) fcpu = std::min(fcpu, cpu.f_base);
    else fg = std::min(fg, gpu.f_base);

    const double t_max = std::max(tg, tc + ttr);
    const double tg_proj = power::task_time_at(tg, fg, gpu.f_base);
    const double tc_proj = power::task_time_at(tc, fcpu, cpu.f_base);
    d.adjust_gpu = !(tg_proj > t_max);
    d.adjust_cpu = !(tc_proj + ttr > t_max);
    d.skipped_gpu = !d.adjust_gpu;
    d.skipped_cpu = !d.adjust_cpu;
    if (d.adjust_gpu) d.f_gpu = fg;
    if (d.adjust_cpu) d.f_cpu = fcpu;
  }

  if (abft.enabled && abft.table != nullptr) {
    const GpuChoice g = protect_gpu(gpu, fc, d.f_gpu, prev_gpu, abft);
    if (g.f != d.f_gpu) d.adjust_gpu = true;
    d.f_gpu = g.f;
    d.single_abft = g.abft.single_check;
    d.full_abft = g.abft.full_check;
    d.abft_feasible = g.abft.feasible;
  }
  return d;
}

ScheduleDecision sr_decide(const power::ProcessorModel& cpu, const power::ProcessorModel& gpu,
                           const IterationForecast& f, Mhz prev_cpu, Mhz prev_gpu) {
  return bsr_decide(0.0, cpu, gpu, f, prev_cpu, prev_gpu, AbftContext{});
}

ScheduleDecision r2h_decide(const power::ProcessorModel& cpu, const power::ProcessorModel& gpu) {
  ScheduleDecision d;
  d.f_cpu = cpu.f_base;
  d.f_gpu = gpu.f_base;
  return d;
}

ScheduleDecision original_decide(const power::ProcessorModel& cpu,
                                 const power::ProcessorModel& gpu) {
  ScheduleDecision d;
  d.f_cpu = cpu.f_base;
  d.f_gpu = gpu.f_base;
  return d;
}

}  // namespace slackwise::scheduler
