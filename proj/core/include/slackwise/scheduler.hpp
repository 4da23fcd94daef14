#pragma once

#include <optional>
#include <string_view>

#include "slackwise/coverage.hpp"
#include "slackwise/power.hpp"
#include "slackwise/types.hpp"

namespace slackwise::scheduler {

enum class Mode { Original, R2H, SR, BSR };

std::string_view to_string(Mode m);
std::optional<Mode> parse_mode(std::string_view s);

struct ScheduleDecision {
  bool adjust_cpu = false;
  bool adjust_gpu = false;
  Mhz f_cpu = 0;  // frequency the task runs at (previous one when not adjusted)
  Mhz f_gpu = 0;
  bool single_abft = false;
  bool full_abft = false;
  bool skipped_cpu = false;  // projection exceeded T_max
  bool skipped_gpu = false;
  bool abft_feasible = true;

  ChecksumScheme scheme() const {
    return full_abft ? ChecksumScheme::Full
                     : (single_abft ? ChecksumScheme::SingleSide : ChecksumScheme::None);
  }
};

/// Predicted base-frequency times for one iteration. Compute-only times drive
/// the slack; the checksum times let the GPU choice weigh ABFT overhead.
struct IterationForecast {
  std::optional<double> t_cpu;
  std::optional<double> t_gpu;
  double t_transfer = 0;
  double gpu_checksum_single = 0;
  double gpu_checksum_full = 0;
};

/// Optional protected overclocking of the GPU.
struct AbftContext {
  bool enabled = false;
  const coverage::ErrorRateTable* table = nullptr;
  coverage::CoverageParams params;
};

/// Smallest grid frequency at or above `value` (with a small tolerance so
/// exact multiples stay put).
Mhz roundup(double value, Mhz step = kGridStepMhz);

/// Bidirectional slack reclamation with ratio r. `prev_cpu` and `prev_gpu` are the
/// frequencies in effect before this iteration.
ScheduleDecision bsr_decide(double r, const power::ProcessorModel& cpu,
                            const power::ProcessorModel& gpu, const IterationForecast& f,
                            Mhz prev_cpu, Mhz prev_gpu, const AbftContext& abft);

/// Slack reclamation: the non-critical side slows to fill the slack.
ScheduleDecision sr_decide(const power::ProcessorModel& cpu, const power::ProcessorModel& gpu,
                           const IterationForecast& f, Mhz prev_cpu, Mhz prev_gpu);

/// Race-to-halt: both at base; the idle side drops to f_min while waiting.
ScheduleDecision r2h_decide(const power::ProcessorModel& cpu, const power::ProcessorModel& gpu);

ScheduleDecision original_decide(const power::ProcessorModel& cpu,
                                 const power::ProcessorModel& gpu);

}  // namespace slackwise::scheduler
