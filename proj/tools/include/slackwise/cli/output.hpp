#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "slackwise/cli/config.hpp"

namespace slackwise::cli {

inline constexpr std::string_view kTraceHeader =
    "iter,task,pred_time_s,actual_time_s,slack_pred_s,slack_actual_s,f_cpu_mhz,f_gpu_mhz,"
    "abft_mode,faults_0d,faults_1d,faults_2d,detected,corrected,e_cpu_dyn_j,e_cpu_stat_j,"
    "e_cpu_idle_j,e_gpu_dyn_j,e_gpu_stat_j,e_gpu_idle_j,skipped";

/// Shortest text that reads back to the same double.
std::string format_double(double x);

/// Five rows per executed iteration: pd, pu, tmu, transfer, idle. Task rows
/// carry task energy; the idle row carries idle energy and the iteration
/// time. A recomputed iteration repeats its iter value.
std::string trace_csv(const std::vector<sim::IterationRecord>& trace);

nlohmann::json summary_json(const CliConfig& config, const sim::RunSummary& s);
std::string pareto_csv(const std::vector<sim::SweepPoint>& points);
nlohmann::json comparison_json(const CliConfig& config,
                               const std::vector<sim::ModeComparison>& rows);
std::string campaign_csv(const std::vector<sim::CampaignRow>& rows);

/// Structural checks for documents this tool writes; throw ConfigError.
void validate_summary(const nlohmann::json& doc);
void validate_comparison(const nlohmann::json& doc);

/// Writes to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace slackwise::cli
