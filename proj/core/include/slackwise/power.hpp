#pragma once

#include <array>
#include <string>
#include <vector>

#include "slackwise/types.hpp"

namespace slackwise::power {

inline constexpr double kDynamicExponent = 2.4;

enum class Guardband { Default, Optimized };

struct AlphaPoint {
  double f_mhz = 0;
  double alpha = 1;
};

/// Power and speed model of one processor. Task rates are flop/s at f_base;
/// a zero rate means the processor does not run that task.
struct ProcessorModel {
  std::string name;
  Mhz f_base = 1000;
  Mhz f_min = 1000;
  Mhz f_max = 1000;
  Mhz step = kGridStepMhz;
  double p_total = 100;  // watts at f_base, default guardband
  double d = 0.7;        // dynamic share of p_total
  /// Guardband total-power factor by frequency, constant beyond the ends.
  std::vector<AlphaPoint> alpha_curve{{0, 1.0}};
  double dvfs_latency_s = 0;
  double gamma = kDynamicExponent;
  std::array<double, 4> task_rate{};  // indexed by TaskKind
  double checksum_rate = 1e9;

  void validate() const;

  double alpha(double f_mhz, Guardband gb) const;
  double dynamic_power(double f_mhz, Guardband gb) const;
  double static_power(double f_mhz, Guardband gb) const;
  double total_power(double f_mhz, Guardband gb) const {
    return dynamic_power(f_mhz, gb) + static_power(f_mhz, gb);
  }
  /// Power while idling with the clock held at f.
  double idle_power(double f_mhz, Guardband gb) const { return total_power(f_mhz, gb); }

  std::vector<Mhz> grid() const;
  Mhz clamp(Mhz f) const;
  bool on_grid(Mhz f) const;

  static ProcessorModel default_cpu();
  static ProcessorModel default_gpu();
};

struct LinkModel {
  double bandwidth_bytes_per_s = 12e9;
  double latency_s = 10e-6;

  double time(double bytes) const { return bytes <= 0 ? 0.0 : latency_s + bytes / bandwidth_bytes_per_s; }
};

/// t_base * f_base / f.
double task_time_at(double t_base, double f_mhz, double f_base_mhz);

struct EnergySplit {
  double dynamic = 0;
  double stat = 0;
  double total() const { return dynamic + stat; }
};

EnergySplit task_energy(const ProcessorModel& m, double f_mhz, Guardband gb, double duration);
double idle_energy(const ProcessorModel& m, double f_mhz, Guardband gb, double duration);

struct ProcessorEnergy {
  double dynamic = 0;
  double stat = 0;
  double idle = 0;
  double total() const { return dynamic + stat + idle; }
  ProcessorEnergy& operator+=(const ProcessorEnergy& o) {
    dynamic += o.dynamic;
    stat += o.stat;
    idle += o.idle;
    return *this;
  }
};

struct EnergyLedger {
  ProcessorEnergy cpu;
  ProcessorEnergy gpu;
  double total() const { return cpu.total() + gpu.total(); }
  EnergyLedger& operator+=(const EnergyLedger& o) {
    cpu += o.cpu;
    gpu += o.gpu;
    return *this;
  }
};

/// Which processor holds the slack (and is therefore non-critical).
enum class SlackSide { Cpu, Gpu };

struct DeltaE {
  double cpu = 0;
  double gpu = 0;
  double total() const { return cpu + gpu; }
};

/// Energy saved by reclaiming `slack`: the non-critical processor stretches
/// by slack (1 - r), the critical one shrinks by slack r. Old state runs at
/// f_base with the default guardband; the new state uses the optimized
/// guardband evaluated at the new frequency.
DeltaE delta_e(const ProcessorModel& cpu, const ProcessorModel& gpu, double t_cpu, double t_gpu,
               double slack, double r, SlackSide side = SlackSide::Cpu);

enum class BreakEvenStatus { Root, AllPositive, AllNegative };

struct BreakEven {
  double r = 0;
  BreakEvenStatus status = BreakEvenStatus::Root;
};

/// r in [0, 1] with ΔE_cpu + ΔE_gpu = 0, by Newton with a bisection fallback.
BreakEven solve_break_even_r(const ProcessorModel& cpu, const ProcessorModel& gpu, double t_cpu,
                             double t_gpu, double slack, SlackSide side = SlackSide::Cpu);

/// Highest flops per joule the processor reaches for any grid frequency,
/// guardband and task it runs. `speedup` bounds extra throughput (drift).
double peak_efficiency(const ProcessorModel& m, double speedup = 1.0);

double theoretical_min_energy(double w_cpu, double w_gpu, double k_cpu_max, double k_gpu_max);

inline double ed2p(double energy, double time) { return energy * time * time; }

}  // namespace slackwise::power
