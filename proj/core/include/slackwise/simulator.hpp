#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slackwise/abft.hpp"
#include "slackwise/coverage.hpp"
#include "slackwise/power.hpp"
#include "slackwise/predictor.hpp"
#include "slackwise/scheduler.hpp"
#include "slackwise/types.hpp"

namespace slackwise::sim {

using scheduler::Mode;

enum class Engine { Analytic, Numeric };
enum class Recovery { Recompute, Abort };

/// Protection applied to GPU tasks. Adaptive follows the scheduler; the other
/// values force a scheme on every iteration while the frequency schedule
/// stays the adaptive one.
enum class AbftPolicy { Adaptive, None, SingleSide, Full };

/// Where the coverage slot count S comes from: blocks written by the GPU in
/// the current iteration, or every block of the matrix.
enum class SlotPolicy { Trailing, Matrix };

std::string_view to_string(Engine e);
std::string_view to_string(Recovery r);
std::string_view to_string(AbftPolicy p);
std::string_view to_string(SlotPolicy p);
std::optional<Engine> parse_engine(std::string_view s);
std::optional<Recovery> parse_recovery(std::string_view s);
std::optional<AbftPolicy> parse_abft_policy(std::string_view s);
std::optional<SlotPolicy> parse_slot_policy(std::string_view s);

inline constexpr double kCorrectResidual = 1e-8;

/// Synthetic efficiency drift: per-processor throughput ramps linearly from
/// (1 - a) at the first iteration to (1 + a) at the last.
struct DriftProfile {
  double cpu = 0;
  double gpu = 0;
};

struct SimConfig {
  DecompositionKind kind = DecompositionKind::LU;
  std::size_t n = 30720;
  std::size_t b = 512;
  Mode mode = Mode::BSR;
  double r = 0;
  std::uint64_t seed = 1;
  Engine engine = Engine::Analytic;
  /// Largest matrix factored for real; bigger runs use a proxy with the same
  /// block count.
  std::size_t numeric_n = 256;
  double noise_sigma = 0;
  DriftProfile drift;
  predictor::PredictorKind predictor = predictor::PredictorKind::Enhanced;
  AbftPolicy abft = AbftPolicy::Adaptive;
  double fc_desired = coverage::kFullCoverage;
  SlotPolicy coverage_slots = SlotPolicy::Trailing;
  Recovery recovery = Recovery::Recompute;
  int max_recoveries = 3;
  double fault_magnitude = 1.0;
  double tau_check = abft::kDefaultTauCheck;
  power::LinkModel link;
  power::ProcessorModel cpu = power::ProcessorModel::default_cpu();
  power::ProcessorModel gpu = power::ProcessorModel::default_gpu();
  coverage::ErrorRateTable gpu_rates = coverage::ErrorRateTable::default_gpu();

  void validate() const;
};

struct TaskRecord {
  double pred_s = 0;    // predicted time at the applied frequency
  double actual_s = 0;  // including checksum work
  double checksum_s = 0;
  power::EnergySplit energy;
  std::array<std::size_t, 3> faults{};
  std::array<std::size_t, 3> detected{};
  std::array<std::size_t, 3> corrected{};
  bool present = false;
};

struct IterationRecord {
  std::size_t k = 0;
  bool recomputed = false;
  std::array<TaskRecord, 4> tasks;  // indexed by TaskKind
  double slack_pred_s = 0;
  double slack_actual_s = 0;
  Mhz f_cpu = 0;
  Mhz f_gpu = 0;
  ChecksumScheme scheme = ChecksumScheme::None;
  bool skipped_cpu = false;
  bool skipped_gpu = false;
  double cpu_busy_s = 0;
  double gpu_busy_s = 0;
  double transfer_s = 0;
  double time_s = 0;
  double cpu_idle_j = 0;
  double gpu_idle_j = 0;
  bool uncorrectable = false;

  const TaskRecord& task(TaskKind t) const { return tasks[index(t)]; }
  TaskRecord& task(TaskKind t) { return tasks[index(t)]; }
};

enum class RunStatus { Ok, NumericBreakdown, Unrecoverable };
std::string_view to_string(RunStatus s);

struct RunSummary {
  RunStatus status = RunStatus::Ok;
  std::string message;
  std::size_t iterations = 0;
  std::size_t recomputes = 0;
  double total_time_s = 0;
  power::EnergyLedger energy;
  double total_energy_j = 0;
  double ed2p = 0;
  double checksum_time_s = 0;
  double compute_time_s = 0;
  double ft_overhead = 0;
  bool numeric = false;
  bool correct = true;
  double residual = 0;
  std::array<std::size_t, 3> faults{};
  std::array<std::size_t, 3> detected{};
  std::array<std::size_t, 3> corrected{};
  double cpu_work_flops = 0;
  double gpu_work_flops = 0;
  double theoretical_min_j = 0;
  double energy_gap = 0;  // (E - E_min) / E_min
  double mean_prediction_error = 0;
};

struct RunResult {
  RunSummary summary;
  std::vector<IterationRecord> trace;
};

/// One iteration's busy intervals and clocks, for energy accounting.
struct IterationPlan {
  std::vector<double> cpu_tasks_s;  // actual durations
  std::vector<double> gpu_tasks_s;
  double transfer_s = 0;
  double f_cpu = 0, f_gpu = 0;  // continuous clocks allowed
  power::Guardband gb_cpu = power::Guardband::Default;
  power::Guardband gb_gpu = power::Guardband::Default;
  double idle_f_cpu = 0, idle_f_gpu = 0;
  double latency_cpu_s = 0, latency_gpu_s = 0;  // DVFS time charged before the tasks
};

struct IterationAccount {
  double cpu_busy_s = 0, gpu_busy_s = 0, time_s = 0;
  std::vector<power::EnergySplit> cpu_tasks, gpu_tasks;
  power::EnergyLedger energy;
};

/// Busy time = DVFS latency + task durations; iteration time =
/// max(GPU busy, CPU busy + transfer). DVFS latency is billed as idle power at
/// the new clock; the remaining idle time at the idle clock.
IterationAccount account_iteration(const power::ProcessorModel& cpu,
                                   const power::ProcessorModel& gpu, const IterationPlan& plan);

RunResult simulate_run(const SimConfig& config);

/// Steady-state scenario: every iteration has the same base-clock busy times
/// and no transfer or fault tolerance work.
struct DeskConfig {
  power::ProcessorModel cpu = power::ProcessorModel::default_cpu();
  power::ProcessorModel gpu = power::ProcessorModel::default_gpu();
  double t_cpu = 1.0;
  double t_gpu = 1.3;
  std::size_t iterations = 10;
};

struct DeskResult {
  double time_s = 0;
  power::EnergyLedger energy;
  double active_j() const {
    return energy.cpu.dynamic + energy.cpu.stat + energy.gpu.dynamic + energy.gpu.stat;
  }
};

/// Runs the scheduler for `mode` over a desk scenario with exact forecasts.
DeskResult simulate_desk(const DeskConfig& desk, Mode mode, double r);

/// Recomputes summary totals from trace rows, in row order.
void summarize_trace(const SimConfig& config, RunResult& result);

struct SweepPoint {
  double r = 0;
  RunSummary summary;
  bool pareto = false;
};

std::vector<SweepPoint> sweep_reclamation_ratio(const SimConfig& config,
                                                const std::vector<double>& r_grid);

/// Indices of points not dominated in (time, energy).
std::vector<bool> pareto_front(const std::vector<std::pair<double, double>>& points);

struct ModeComparison {
  Mode mode = Mode::Original;
  RunSummary summary;
  double energy_saving_pct = 0;
  double ed2p_reduction_pct = 0;
  double speedup = 1;
};

std::vector<ModeComparison> compare_modes(const SimConfig& config, const std::vector<Mode>& modes);

struct CampaignRow {
  AbftPolicy scheme = AbftPolicy::None;
  std::size_t trials = 0;
  std::size_t correct = 0;
  double correct_fraction = 0;
  double overhead_fraction = 0;
  std::size_t faults = 0;
};

/// Repeats seeded numeric runs (seed, seed + 1, ...) under each protection
/// policy with recovery set to abort.
std::vector<CampaignRow> fault_campaign(const SimConfig& config, std::size_t trials,
                                        const std::vector<AbftPolicy>& schemes = {
                                            AbftPolicy::None, AbftPolicy::SingleSide,
                                            AbftPolicy::Full, AbftPolicy::Adaptive});

/// Relative errors of per-task time predictions over a trace.
predictor::ErrorStats prediction_error_stats(const std::vector<IterationRecord>& trace);

/// Worker count for batch runs: SLACKWISE_THREADS if set, else hardware.
std::size_t worker_count();

}  // namespace slackwise::sim
