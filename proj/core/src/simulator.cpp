#include "slackwise/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <random>
#include <thread>

#include "slackwise/factorization.hpp"
#include "slackwise/flops.hpp"

namespace slackwise::sim {

using linalg::BlockLayout;
using predictor::Component;

std::string_view to_string(Engine e) { return e == Engine::Analytic ? "analytic" : "numeric"; }
std::string_view to_string(Recovery r) { return r == Recovery::Recompute ? "recompute" : "abort"; }
std::string_view to_string(AbftPolicy p) {
  switch (p) {
    case AbftPolicy::Adaptive: return "adaptive";
    case AbftPolicy::None: return "none";
    case AbftPolicy::SingleSide: return "single";
    case AbftPolicy::Full: return "full";
  }
  return "?";
}
std::string_view to_string(SlotPolicy p) { return p == SlotPolicy::Trailing ? "trailing" : "matrix"; }
std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Ok: return "ok";
    case RunStatus::NumericBreakdown: return "numeric_breakdown";
    case RunStatus::Unrecoverable: return "unrecoverable_fault";
  }
  return "?";
}

std::optional<Engine> parse_engine(std::string_view s) {
  if (s == "analytic") return Engine::Analytic;
  if (s == "numeric" || s == "numeric+analytic") return Engine::Numeric;
  return std::nullopt;
}
std::optional<Recovery> parse_recovery(std::string_view s) {
  if (s == "recompute" || s == "recompute-iteration") return Recovery::Recompute;
  if (s == "abort") return Recovery::Abort;
  return std::nullopt;
}
std::optional<AbftPolicy> parse_abft_policy(std::string_view s) {
  if (s == "adaptive") return AbftPolicy::Adaptive;
  if (auto sc = parse_scheme(s)) {
    switch (*sc) {
      case ChecksumScheme::None: return AbftPolicy::None;
      case ChecksumScheme::SingleSide: return AbftPolicy::SingleSide;
      case ChecksumScheme::Full: return AbftPolicy::Full;
    }
  }
  return std::nullopt;
}
std::optional<SlotPolicy> parse_slot_policy(std::string_view s) {
  if (s == "trailing") return SlotPolicy::Trailing;
  if (s == "matrix") return SlotPolicy::Matrix;
  return std::nullopt;
}

void SimConfig::validate() const {
  if (b == 0 || n < b) throw InvalidArgument("need 1 <= b <= n");
  if (!(r >= 0 && r <= 1)) throw InvalidArgument("r must be in [0, 1]");
  if (!(noise_sigma >= 0) || !std::isfinite(noise_sigma))
    throw InvalidArgument("noise_sigma must be >= 0");
  if (!(drift.cpu >= 0 && drift.cpu < 1 && drift.gpu >= 0 && drift.gpu < 1))
    throw InvalidArgument("drift amplitudes must be in [0, 1)");
  if (numeric_n < 2) throw InvalidArgument("numeric_n must be >= 2");
  if (!(fc_desired > 0 && fc_desired <= 1)) throw InvalidArgument("fc_desired must be in (0, 1]");
  if (max_recoveries < 0) throw InvalidArgument("max_recoveries must be >= 0");
  if (!(fault_magnitude > 0)) throw InvalidArgument("fault_magnitude must be positive");
  if (!(tau_check > 0)) throw InvalidArgument("tau_check must be positive");
  if (!(link.bandwidth_bytes_per_s > 0) || !(link.latency_s >= 0))
    throw InvalidArgument("link needs positive bandwidth and non-negative latency");
  cpu.validate();
  gpu.validate();
  if (cpu.task_rate[index(TaskKind::PD)] <= 0) throw InvalidArgument("cpu needs a PD rate");
  if (gpu.task_rate[index(TaskKind::PU)] <= 0 || gpu.task_rate[index(TaskKind::TMU)] <= 0)
    throw InvalidArgument("gpu needs PU and TMU rates");
}

IterationAccount account_iteration(const power::ProcessorModel& cpu,
                                   const power::ProcessorModel& gpu, const IterationPlan& p) {
  IterationAccount acc;
  acc.cpu_busy_s = p.latency_cpu_s;
  acc.gpu_busy_s = p.latency_gpu_s;
  for (double t : p.cpu_tasks_s) {
    acc.cpu_busy_s += t;
    acc.cpu_tasks.push_back(power::task_energy(cpu, p.f_cpu, p.gb_cpu, t));
    acc.energy.cpu.dynamic += acc.cpu_tasks.back().dynamic;
    acc.energy.cpu.stat += acc.cpu_tasks.back().stat;
  }
  for (double t : p.gpu_tasks_s) {
    acc.gpu_busy_s += t;
    acc.gpu_tasks.push_back(power::task_energy(gpu, p.f_gpu, p.gb_gpu, t));
    acc.energy.gpu.dynamic += acc.gpu_tasks.back().dynamic;
    acc.energy.gpu.stat += acc.gpu_tasks.back().stat;
  }
  acc.time_s = std::max(acc.gpu_busy_s, acc.cpu_busy_s + p.transfer_s);
  acc.energy.cpu.idle =
      power::idle_energy(cpu, p.f_cpu, p.gb_cpu, p.latency_cpu_s) +
      power::idle_energy(cpu, p.idle_f_cpu, p.gb_cpu, acc.time_s - acc.cpu_busy_s);
  acc.energy.gpu.idle =
      power::idle_energy(gpu, p.f_gpu, p.gb_gpu, p.latency_gpu_s) +
      power::idle_energy(gpu, p.idle_f_gpu, p.gb_gpu, acc.time_s - acc.gpu_busy_s);
  return acc;
}

namespace {

constexpr std::array<TaskKind, 2> kGpuTasks = {TaskKind::PU, TaskKind::TMU};

double drift_factor(double a, std::size_t k, std::size_t nb) {
  if (a == 0 || nb < 2) return 1.0;
  return (1 - a) + 2 * a * static_cast<double>(k) / static_cast<double>(nb - 1);
}

ChecksumScheme applied_scheme(AbftPolicy p, const scheduler::ScheduleDecision& d) {
  switch (p) {
    case AbftPolicy::Adaptive: return d.scheme();
    case AbftPolicy::None: return ChecksumScheme::None;
    case AbftPolicy::SingleSide: return ChecksumScheme::SingleSide;
    case AbftPolicy::Full: return ChecksumScheme::Full;
  }
  return ChecksumScheme::None;
}

struct NumericEngine {
  BlockLayout layout;
  linalg::DenseMatrix original;
  linalg::FactorizationState state;
};

std::optional<NumericEngine> make_engine(const SimConfig& c, const BlockLayout& real) {
  if (c.engine != Engine::Numeric) return std::nullopt;
  std::size_t pn = c.n, pb = c.b;
  if (c.n > c.numeric_n) {
    pb = std::max<std::size_t>(2, c.numeric_n / real.n_blocks());
    pn = pb * real.n_blocks();
  }
  auto a = linalg::generate_test_matrix(c.kind, pn, c.seed);
  auto state = linalg::begin_factorization(c.kind, a, pb);
  return NumericEngine{BlockLayout(pn, pb), std::move(a), std::move(state)};
}

// Predicted base-frequency seconds for a component, falling back to the
// nominal model when nothing has been profiled yet.
struct Forecaster {
  const SimConfig& c;
  const predictor::SlackPredictor& pred;

  double nominal(TaskKind task, Component comp, ChecksumScheme s, std::size_t k) const {
    const double work = predictor::complexity(c.kind, task, comp, s, c.n, c.b, k);
    if (task == TaskKind::Transfer) return work / c.link.bandwidth_bytes_per_s;
    const power::ProcessorModel& m = task == TaskKind::PD ? c.cpu : c.gpu;
    const double rate = comp == Component::Compute ? m.task_rate[index(task)] : m.checksum_rate;
    return work / rate;
  }
  std::optional<double> known(TaskKind task, Component comp, ChecksumScheme s, std::size_t k) const {
    return pred.predict(task, comp, s, k);
  }
  double get(TaskKind task, Component comp, ChecksumScheme s, std::size_t k) const {
    return known(task, comp, s, k).value_or(nominal(task, comp, s, k));
  }
  double gpu_checksum(ChecksumScheme s, std::size_t k) const {
    double t = 0;
    for (TaskKind task : kGpuTasks)
      t += get(task, Component::ChecksumUpdate, s, k) + get(task, Component::ChecksumVerify, s, k);
    return t;
  }
};

std::size_t coverage_slots(const SimConfig& c, const BlockLayout& layout, std::size_t k) {
  if (c.coverage_slots == SlotPolicy::Matrix) return layout.n_blocks() * layout.n_blocks();
  std::size_t s = 0;
  for (TaskKind t : kGpuTasks) s += linalg::task_output_region(c.kind, t, layout, k).block_count();
  return std::max<std::size_t>(s, 1);
}

}  // namespace

RunResult simulate_run(const SimConfig& c) {
  c.validate();
  const BlockLayout layout(c.n, c.b);
  const std::size_t nb = layout.n_blocks();
  predictor::SlackPredictor pred(c.kind, c.n, c.b, c.predictor);
  const Forecaster fcst{c, pred};
  std::seed_seq noise_seq{c.seed, std::uint64_t{0x6e6f697365}};
  std::seed_seq fault_seq{c.seed, std::uint64_t{0x6661756c74}};
  std::mt19937_64 noise_rng(noise_seq);
  std::mt19937_64 fault_rng(fault_seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto noise = [&] { return c.noise_sigma > 0 ? std::exp(c.noise_sigma * normal(noise_rng)) : 1.0; };

  const power::Guardband gb = c.mode == Mode::BSR ? power::Guardband::Optimized
                                                  : power::Guardband::Default;
  std::optional<NumericEngine> eng = make_engine(c, layout);

  RunResult result;
  RunSummary& sum = result.summary;
  sum.numeric = eng.has_value();
  Mhz cur_cpu = c.cpu.f_base, cur_gpu = c.gpu.f_base;

  for (std::size_t k = 0; k < nb && sum.status == RunStatus::Ok; ++k) {
    // Forecast from profiled history (compute-only times drive the slack).
    scheduler::IterationForecast fc;
    fc.t_cpu = fcst.known(TaskKind::PD, Component::Compute, ChecksumScheme::None, k);
    {
      auto pu = fcst.known(TaskKind::PU, Component::Compute, ChecksumScheme::None, k);
      auto tmu = fcst.known(TaskKind::TMU, Component::Compute, ChecksumScheme::None, k);
      if (pu && tmu) fc.t_gpu = *pu + *tmu;
    }
    fc.t_transfer = fcst.get(TaskKind::Transfer, Component::Compute, ChecksumScheme::None, k) +
                    c.link.latency_s;
    fc.gpu_checksum_single = fcst.gpu_checksum(ChecksumScheme::SingleSide, k);
    fc.gpu_checksum_full = fcst.gpu_checksum(ChecksumScheme::Full, k);

    scheduler::ScheduleDecision d;
    switch (c.mode) {
      case Mode::Original: d = scheduler::original_decide(c.cpu, c.gpu); break;
      case Mode::R2H: d = scheduler::r2h_decide(c.cpu, c.gpu); break;
      case Mode::SR: d = scheduler::sr_decide(c.cpu, c.gpu, fc, cur_cpu, cur_gpu); break;
      case Mode::BSR: {
        scheduler::AbftContext ctx;
        ctx.enabled = true;
        ctx.table = &c.gpu_rates;
        ctx.params.slots = coverage_slots(c, layout, k);
        ctx.params.fc_desired = c.fc_desired;
        d = scheduler::bsr_decide(c.r, c.cpu, c.gpu, fc, cur_cpu, cur_gpu, ctx);
        break;
      }
    }
    const ChecksumScheme scheme = applied_scheme(c.abft, d);
    const double lat_cpu = d.f_cpu != cur_cpu ? c.cpu.dvfs_latency_s : 0.0;
    const double lat_gpu = d.f_gpu != cur_gpu ? c.gpu.dvfs_latency_s : 0.0;
    cur_cpu = d.f_cpu;
    cur_gpu = d.f_gpu;
    const double sc = static_cast<double>(d.f_cpu) / c.cpu.f_base;
    const double sg = static_cast<double>(d.f_gpu) / c.gpu.f_base;
    const double ec = drift_factor(c.drift.cpu, k, nb);
    const double eg = drift_factor(c.drift.gpu, k, nb);

    // Predicted times at the applied clocks, for the trace.
    std::array<double, 4> pred_s{};
    std::array<bool, 4> predicted{};
    for (TaskKind t : kTaskKinds) {
      auto comp = fcst.known(t, Component::Compute, ChecksumScheme::None, k);
      predicted[index(t)] = comp.has_value();
      double base = comp.value_or(0.0);
      if (t == TaskKind::Transfer) {
        base += c.link.latency_s +
                fcst.get(t, Component::ChecksumUpdate, scheme, k);
        pred_s[index(t)] = base;
        continue;
      }
      base += fcst.get(t, Component::ChecksumUpdate, scheme, k) +
              fcst.get(t, Component::ChecksumVerify, scheme, k);
      pred_s[index(t)] = power::task_time_at(base, t == TaskKind::PD ? sc : sg, 1.0);
    }
    double slack_pred = 0;
    {
      predictor::IterationPrediction ip;
      for (TaskKind t : kTaskKinds)
        for (Component comp : predictor::kComponents)
          ip.at(t, comp) = comp == Component::Compute
                               ? fcst.known(t, comp, ChecksumScheme::None, k).value_or(0.0)
                               : fcst.get(t, comp, scheme, k);
      ip.at(TaskKind::Transfer, Component::Compute) += c.link.latency_s;
      slack_pred = predictor::predict_slack(ip, scheme != ChecksumScheme::None);
    }

    bool recorded = false;
    for (int attempt = 0;; ++attempt) {
      IterationRecord rec;
      rec.k = k;
      rec.recomputed = attempt > 0;
      rec.f_cpu = d.f_cpu;
      rec.f_gpu = d.f_gpu;
      rec.scheme = scheme;
      rec.skipped_cpu = d.skipped_cpu;
      rec.skipped_gpu = d.skipped_gpu;
      rec.slack_pred_s = slack_pred;

      // Realized component times.
      std::array<std::array<double, 3>, 4> comp_s{};
      for (TaskKind t : kTaskKinds) {
        for (Component comp : predictor::kComponents) {
          const ChecksumScheme s = comp == Component::Compute ? ChecksumScheme::None : scheme;
          const double work = predictor::complexity(c.kind, t, comp, s, c.n, c.b, k);
          if (work == 0) continue;
          double secs = 0;
          if (t == TaskKind::Transfer) {
            secs = work / c.link.bandwidth_bytes_per_s * noise();
          } else if (t == TaskKind::PD) {
            const double rate = comp == Component::Compute ? c.cpu.task_rate[index(t)] : c.cpu.checksum_rate;
            secs = work / (rate * sc * ec) * noise();
          } else {
            const double rate = comp == Component::Compute ? c.gpu.task_rate[index(t)] : c.gpu.checksum_rate;
            secs = work / (rate * sg * eg) * noise();
          }
          comp_s[index(t)][predictor::index(comp)] = secs;
        }
      }
      const double transfer_s = comp_s[index(TaskKind::Transfer)][0] +
                                comp_s[index(TaskKind::Transfer)][1] + c.link.latency_s;

      // Numeric execution with fault injection and ABFT.
      if (eng) {
        const linalg::FactorizationState snapshot = eng->state;
        try {
          for (TaskKind t : linalg::task_sequence(c.kind)) {
            std::vector<abft::InjectedFault> plan;
            const auto region = linalg::task_output_region(c.kind, t, eng->layout, k);
            if (t != TaskKind::PD && !region.empty()) {
              const double secs = comp_s[index(t)][0];
              for (ErrorKind ek : kErrorKinds) {
                const double mean = c.gpu_rates.rate(d.f_gpu, ek) * secs;
                if (mean <= 0) continue;
                const long count = std::poisson_distribution<long>(mean)(fault_rng);
                for (long i = 0; i < count; ++i)
                  plan.push_back(abft::random_fault(ek, eng->layout, region, c.fault_magnitude,
                                                    fault_rng, k, t));
                rec.task(t).faults[index(ek)] += static_cast<std::size_t>(count);
              }
            }
            const abft::CorrectionReport rep =
                abft::protected_task(eng->state, t, k, scheme, plan, c.tau_check);
            rec.task(t).detected = rep.detected;
            rec.task(t).corrected = rep.corrected;
            rec.uncorrectable = rec.uncorrectable || rep.uncorrectable;
          }
          ++eng->state.iterations_done;
        } catch (const NumericBreakdown& e) {
          eng->state = snapshot;
          sum.status = RunStatus::NumericBreakdown;
          sum.message = e.what();
        }
        if (rec.uncorrectable && sum.status == RunStatus::Ok) {
          eng->state = snapshot;
          if (c.recovery == Recovery::Abort || attempt >= c.max_recoveries) {
            sum.status = RunStatus::Unrecoverable;
            sum.message = "uncorrectable fault at iteration " + std::to_string(k);
          }
        }
      }

      IterationPlan plan;
      const double lc = attempt == 0 ? lat_cpu : 0.0;
      const double lg = attempt == 0 ? lat_gpu : 0.0;
      auto task_total = [&](TaskKind t) {
        const auto& v = comp_s[index(t)];
        return v[0] + v[1] + v[2];
      };
      plan.cpu_tasks_s = {task_total(TaskKind::PD)};
      plan.gpu_tasks_s = {task_total(TaskKind::PU), task_total(TaskKind::TMU)};
      plan.transfer_s = transfer_s;
      plan.f_cpu = d.f_cpu;
      plan.f_gpu = d.f_gpu;
      plan.gb_cpu = plan.gb_gpu = gb;
      plan.idle_f_cpu = c.mode == Mode::R2H ? c.cpu.f_min : d.f_cpu;
      plan.idle_f_gpu = c.mode == Mode::R2H ? c.gpu.f_min : d.f_gpu;
      plan.latency_cpu_s = lc;
      plan.latency_gpu_s = lg;
      const IterationAccount acc = account_iteration(c.cpu, c.gpu, plan);

      for (TaskKind t : kTaskKinds) {
        TaskRecord& tr = rec.task(t);
        const auto& v = comp_s[index(t)];
        tr.actual_s = t == TaskKind::Transfer ? transfer_s : v[0] + v[1] + v[2];
        tr.checksum_s = v[1] + v[2];
        tr.pred_s = pred_s[index(t)];
        tr.present = predicted[index(t)];
      }
      rec.task(TaskKind::PD).energy = acc.cpu_tasks[0];
      rec.task(TaskKind::PU).energy = acc.gpu_tasks[0];
      rec.task(TaskKind::TMU).energy = acc.gpu_tasks[1];
      rec.cpu_busy_s = acc.cpu_busy_s;
      rec.gpu_busy_s = acc.gpu_busy_s;
      rec.transfer_s = transfer_s;
      rec.time_s = acc.time_s;
      rec.cpu_idle_j = acc.energy.cpu.idle;
      rec.gpu_idle_j = acc.energy.gpu.idle;
      rec.slack_actual_s = acc.gpu_busy_s - acc.cpu_busy_s - transfer_s;

      if (!recorded) {
        recorded = true;
        for (TaskKind t : kTaskKinds) {
          const double f_scale = t == TaskKind::PD ? sc : (t == TaskKind::Transfer ? 1.0 : sg);
          for (Component comp : predictor::kComponents) {
            const double secs = comp_s[index(t)][predictor::index(comp)];
            if (secs <= 0) continue;
            const ChecksumScheme s = comp == Component::Compute ? ChecksumScheme::None : scheme;
            pred.record(t, comp, s, k, secs * f_scale);
          }
        }
      }
      result.trace.push_back(rec);
      if (!rec.uncorrectable || sum.status != RunStatus::Ok) break;
    }
  }

  if (eng) {
    if (sum.status == RunStatus::Ok) {
      sum.residual = linalg::residual(eng->original, eng->state);
      sum.correct = sum.residual <= kCorrectResidual;
    } else {
      sum.residual = std::numeric_limits<double>::quiet_NaN();
      sum.correct = false;
    }
  }
  summarize_trace(c, result);
  return result;
}

DeskResult simulate_desk(const DeskConfig& desk, Mode mode, double r) {
  desk.cpu.validate();
  desk.gpu.validate();
  if (!(desk.t_cpu > 0 && desk.t_gpu > 0)) throw InvalidArgument("desk times must be positive");
  if (!(r >= 0 && r <= 1)) throw InvalidArgument("r must be in [0, 1]");
  const power::Guardband gb = mode == Mode::BSR ? power::Guardband::Optimized
                                                : power::Guardband::Default;
  scheduler::IterationForecast fc;
  fc.t_cpu = desk.t_cpu;
  fc.t_gpu = desk.t_gpu;
  fc.t_transfer = 0;
  DeskResult out;
  Mhz cur_cpu = desk.cpu.f_base, cur_gpu = desk.gpu.f_base;
  for (std::size_t k = 0; k < desk.iterations; ++k) {
    scheduler::ScheduleDecision d;
    switch (mode) {
      case Mode::Original: d = scheduler::original_decide(desk.cpu, desk.gpu); break;
      case Mode::R2H: d = scheduler::r2h_decide(desk.cpu, desk.gpu); break;
      case Mode::SR: d = scheduler::sr_decide(desk.cpu, desk.gpu, fc, cur_cpu, cur_gpu); break;
      case Mode::BSR:
        d = scheduler::bsr_decide(r, desk.cpu, desk.gpu, fc, cur_cpu, cur_gpu, {});
        break;
    }
    IterationPlan plan;
    plan.cpu_tasks_s = {power::task_time_at(desk.t_cpu, d.f_cpu, desk.cpu.f_base)};
    plan.gpu_tasks_s = {power::task_time_at(desk.t_gpu, d.f_gpu, desk.gpu.f_base)};
    plan.f_cpu = d.f_cpu;
    plan.f_gpu = d.f_gpu;
    plan.gb_cpu = plan.gb_gpu = gb;
    plan.idle_f_cpu = mode == Mode::R2H ? desk.cpu.f_min : d.f_cpu;
    plan.idle_f_gpu = mode == Mode::R2H ? desk.gpu.f_min : d.f_gpu;
    plan.latency_cpu_s = d.f_cpu != cur_cpu ? desk.cpu.dvfs_latency_s : 0.0;
    plan.latency_gpu_s = d.f_gpu != cur_gpu ? desk.gpu.dvfs_latency_s : 0.0;
    cur_cpu = d.f_cpu;
    cur_gpu = d.f_gpu;
    const IterationAccount acc = account_iteration(desk.cpu, desk.gpu, plan);
    out.time_s += acc.time_s;
    out.energy += acc.energy;
  }
  return out;
}

void summarize_trace(const SimConfig& c, RunResult& result) {
  RunSummary& s = result.summary;
  s.iterations = 0;
  s.recomputes = 0;
  s.total_time_s = 0;
  s.energy = {};
  s.checksum_time_s = 0;
  s.compute_time_s = 0;
  s.faults = s.detected = s.corrected = {};
  s.cpu_work_flops = s.gpu_work_flops = 0;
  for (const IterationRecord& r : result.trace) {
    ++s.iterations;
    if (r.recomputed) ++s.recomputes;
    s.total_time_s += r.time_s;
    // Same order as the trace rows: pd, pu, tmu, transfer, idle.
    for (TaskKind t : kTaskKinds) {
      const TaskRecord& tr = r.task(t);
      if (t == TaskKind::PD) {
        s.energy.cpu.dynamic += tr.energy.dynamic;
        s.energy.cpu.stat += tr.energy.stat;
      } else if (t != TaskKind::Transfer) {
        s.energy.gpu.dynamic += tr.energy.dynamic;
        s.energy.gpu.stat += tr.energy.stat;
      }
      if (t != TaskKind::Transfer) {
        s.checksum_time_s += tr.checksum_s;
        s.compute_time_s += tr.actual_s - tr.checksum_s;
      }
      for (std::size_t i = 0; i < 3; ++i) {
        s.faults[i] += tr.faults[i];
        s.detected[i] += tr.detected[i];
        s.corrected[i] += tr.corrected[i];
      }
    }
    s.energy.cpu.idle += r.cpu_idle_j;
    s.energy.gpu.idle += r.gpu_idle_j;
    for (TaskKind t : kTaskKinds) {
      if (t == TaskKind::Transfer) continue;
      double flops = linalg::task_flops(c.kind, t, c.n, c.b, r.k);
      for (auto comp : {linalg::ChecksumComponent::Update, linalg::ChecksumComponent::Verify})
        flops += linalg::checksum_flops(r.scheme, c.kind, t, comp, c.n, c.b, r.k);
      (t == TaskKind::PD ? s.cpu_work_flops : s.gpu_work_flops) += flops;
    }
  }
  s.total_energy_j = s.energy.total();
  s.ed2p = power::ed2p(s.total_energy_j, s.total_time_s);
  s.ft_overhead = s.compute_time_s > 0 ? s.checksum_time_s / s.compute_time_s : 0.0;
  s.theoretical_min_j = power::theoretical_min_energy(
      s.cpu_work_flops, s.gpu_work_flops, power::peak_efficiency(c.cpu, 1 + c.drift.cpu),
      power::peak_efficiency(c.gpu, 1 + c.drift.gpu));
  s.energy_gap = s.theoretical_min_j > 0
                     ? (s.total_energy_j - s.theoretical_min_j) / s.theoretical_min_j
                     : 0.0;
  s.mean_prediction_error = prediction_error_stats(result.trace).mean;
}

predictor::ErrorStats prediction_error_stats(const std::vector<IterationRecord>& trace) {
  std::vector<double> p, a;
  for (const IterationRecord& r : trace)
    for (TaskKind t : kTaskKinds) {
      const TaskRecord& tr = r.task(t);
      if (!tr.present) continue;
      p.push_back(tr.pred_s);
      a.push_back(tr.actual_s);
    }
  return predictor::relative_errors(p, a);
}

std::size_t worker_count() {
  std::size_t n = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SLACKWISE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) n = std::min<std::size_t>(n, static_cast<std::size_t>(v));
  }
  return n;
}

namespace {

// Runs job(i) for i in [0, count) on up to worker_count() threads.
template <typename Job>
void parallel_for(std::size_t count, Job job) {
  const std::size_t workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          job(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<bool> pareto_front(const std::vector<std::pair<double, double>>& pts) {
  std::vector<bool> front(pts.size(), true);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size() && front[i]; ++j) {
      if (i == j) continue;
      const bool le = pts[j].first <= pts[i].first && pts[j].second <= pts[i].second;
      const bool lt = pts[j].first < pts[i].first || pts[j].second < pts[i].second;
      if (le && lt) front[i] = false;
    }
  return front;
}

std::vector<SweepPoint> sweep_reclamation_ratio(const SimConfig& config,
                                                const std::vector<double>& r_grid) {
  if (r_grid.empty()) throw InvalidArgument("sweep needs a non-empty r grid");
  for (double r : r_grid)
    if (!(r >= 0 && r <= 1)) throw InvalidArgument("sweep r values must be in [0, 1]");
  std::vector<SweepPoint> out(r_grid.size());
  parallel_for(r_grid.size(), [&](std::size_t i) {
    SimConfig c = config;
    c.r = r_grid[i];
    out[i].r = r_grid[i];
    out[i].summary = simulate_run(c).summary;
  });
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : out) pts.emplace_back(p.summary.total_time_s, p.summary.total_energy_j);
  const auto front = pareto_front(pts);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].pareto = front[i];
  return out;
}

std::vector<ModeComparison> compare_modes(const SimConfig& config, const std::vector<Mode>& modes) {
  if (modes.empty()) throw InvalidArgument("compare needs at least one mode");
  std::vector<Mode> all{Mode::Original};
  for (Mode m : modes)
    if (std::find(all.begin(), all.end(), m) == all.end()) all.push_back(m);
  std::vector<RunSummary> sums(all.size());
  parallel_for(all.size(), [&](std::size_t i) {
    SimConfig c = config;
    c.mode = all[i];
    sums[i] = simulate_run(c).summary;
  });
  const RunSummary& ref = sums[0];
  std::vector<ModeComparison> out;
  for (Mode m : modes) {
    const std::size_t i = static_cast<std::size_t>(std::find(all.begin(), all.end(), m) - all.begin());
    ModeComparison mc;
    mc.mode = m;
    mc.summary = sums[i];
    mc.energy_saving_pct = 100.0 * (ref.total_energy_j - sums[i].total_energy_j) / ref.total_energy_j;
    mc.ed2p_reduction_pct = 100.0 * (ref.ed2p - sums[i].ed2p) / ref.ed2p;
    mc.speedup = ref.total_time_s / sums[i].total_time_s;
    out.push_back(mc);
  }
  return out;
}

std::vector<CampaignRow> fault_campaign(const SimConfig& config, std::size_t trials,
                                        const std::vector<AbftPolicy>& schemes) {
  if (trials == 0) throw InvalidArgument("campaign needs at least one trial");
  std::vector<CampaignRow> rows;
  for (AbftPolicy p : schemes) {
    std::vector<RunSummary> sums(trials);
    parallel_for(trials, [&](std::size_t t) {
      SimConfig c = config;
      c.engine = Engine::Numeric;
      c.recovery = Recovery::Abort;
      c.abft = p;
      c.seed = config.seed + t;
      sums[t] = simulate_run(c).summary;
    });
    CampaignRow row;
    row.scheme = p;
    row.trials = trials;
    double overhead = 0;
    for (const RunSummary& s : sums) {
      if (s.correct) ++row.correct;
      overhead += s.ft_overhead;
      row.faults += s.faults[0] + s.faults[1] + s.faults[2];
    }
    row.correct_fraction = static_cast<double>(row.correct) / static_cast<double>(trials);
    row.overhead_fraction = overhead / static_cast<double>(trials);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace slackwise::sim
