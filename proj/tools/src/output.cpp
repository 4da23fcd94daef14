#include "slackwise/cli/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <system_error>

#include <unistd.h>

namespace slackwise::cli {

using json = nlohmann::json;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string skipped_label(const sim::IterationRecord& r) {
  if (r.skipped_cpu && r.skipped_gpu) return "both";
  if (r.skipped_cpu) return "cpu";
  if (r.skipped_gpu) return "gpu";
  return "none";
}

template <typename T>
std::size_t sum3(const std::array<T, 3>& a) {
  return a[0] + a[1] + a[2];
}

json energy_json(const power::ProcessorEnergy& e) {
  return {{"dynamic_j", e.dynamic}, {"static_j", e.stat}, {"idle_j", e.idle}};
}

json counts_json(const std::array<std::size_t, 3>& a) {
  return {{"0d", a[0]}, {"1d", a[1]}, {"2d", a[2]}};
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

void require(const json& doc, const std::string& ptr, std::string_view key,
             json::value_t type) {
  const auto it = doc.find(std::string(key));
  const std::string p = ptr + "/" + std::string(key);
  if (it == doc.end()) throw ConfigError(p, "missing");
  const bool number = type == json::value_t::number_float;
  if (number ? !it->is_number() : it->type() != type)
    throw ConfigError(p, "wrong type");
}

}  // namespace

std::string trace_csv(const std::vector<sim::IterationRecord>& trace) {
  std::string out(kTraceHeader);
  out += '\n';
  for (const sim::IterationRecord& r : trace) {
    const std::string common_tail = "," + skipped_label(r) + "\n";
    auto row = [&](std::string_view task, const std::string& pred, double actual,
                   const std::array<std::size_t, 3>& faults, std::size_t detected,
                   std::size_t corrected, const std::array<double, 6>& e) {
      out += std::to_string(r.k);
      out += ',';
      out += task;
      out += ',' + pred;
      out += ',' + format_double(actual);
      out += ',' + format_double(r.slack_pred_s);
      out += ',' + format_double(r.slack_actual_s);
      out += ',' + std::to_string(r.f_cpu);
      out += ',' + std::to_string(r.f_gpu);
      out += ',';
      out += to_string(r.scheme);
      for (std::size_t f : faults) out += ',' + std::to_string(f);
      out += ',' + std::to_string(detected);
      out += ',' + std::to_string(corrected);
      for (double x : e) out += ',' + format_double(x);
      out += common_tail;
    };
    for (TaskKind t : kTaskKinds) {
      const sim::TaskRecord& tr = r.task(t);
      std::array<double, 6> e{};
      if (t == TaskKind::PD) {
        e[0] = tr.energy.dynamic;
        e[1] = tr.energy.stat;
      } else if (t != TaskKind::Transfer) {
        e[3] = tr.energy.dynamic;
        e[4] = tr.energy.stat;
      }
      row(to_string(t), tr.present ? format_double(tr.pred_s) : std::string(), tr.actual_s,
          tr.faults, sum3(tr.detected), sum3(tr.corrected), e);
    }
    row("idle", std::string(), r.time_s, {}, 0, 0, {0, 0, r.cpu_idle_j, 0, 0, r.gpu_idle_j});
  }
  return out;
}

namespace {

// Config echo without the output location, so files do not depend on where
// they were written.
json config_echo(const CliConfig& config) {
  json j = to_json(config);
  j.erase("out_dir");
  return j;
}

void validate_echo(const json& config) {
  try {
    parse_config(config);
  } catch (const ConfigError& e) {
    throw ConfigError("/config" + e.pointer(), e.what());
  }
}

}  // namespace

json summary_json(const CliConfig& config, const sim::RunSummary& s) {
  return {{"status", std::string(sim::to_string(s.status))},
          {"message", s.message},
          {"iterations", s.iterations},
          {"recomputes", s.recomputes},
          {"total_time_s", s.total_time_s},
          {"total_energy_j", s.total_energy_j},
          {"ed2p", s.ed2p},
          {"energy", {{"cpu", energy_json(s.energy.cpu)}, {"gpu", energy_json(s.energy.gpu)}}},
          {"checksum_time_s", s.checksum_time_s},
          {"compute_time_s", s.compute_time_s},
          {"ft_overhead", s.ft_overhead},
          {"numeric", s.numeric},
          {"correct", s.numeric ? json(s.correct) : json(nullptr)},
          {"residual", s.numeric ? number_or_null(s.residual) : json(nullptr)},
          {"faults", counts_json(s.faults)},
          {"detected", counts_json(s.detected)},
          {"corrected", counts_json(s.corrected)},
          {"cpu_work_flops", s.cpu_work_flops},
          {"gpu_work_flops", s.gpu_work_flops},
          {"theoretical_min_j", s.theoretical_min_j},
          {"energy_gap", s.energy_gap},
          {"mean_prediction_error", s.mean_prediction_error},
          {"config", config_echo(config)}};
}

std::string pareto_csv(const std::vector<sim::SweepPoint>& points) {
  std::string out = "r,time_s,energy_j,ed2p,pareto\n";
  for (const sim::SweepPoint& p : points) {
    out += format_double(p.r) + ',' + format_double(p.summary.total_time_s) + ',' +
           format_double(p.summary.total_energy_j) + ',' + format_double(p.summary.ed2p) + ',' +
           (p.pareto ? "1" : "0") + '\n';
  }
  return out;
}

json comparison_json(const CliConfig& config, const std::vector<sim::ModeComparison>& rows) {
  json modes = json::array();
  for (const sim::ModeComparison& m : rows) {
    modes.push_back({{"mode", std::string(to_string(m.mode))},
                     {"energy_saving_pct", m.energy_saving_pct},
                     {"ed2p_reduction_pct", m.ed2p_reduction_pct},
                     {"speedup", m.speedup},
                     {"total_time_s", m.summary.total_time_s},
                     {"total_energy_j", m.summary.total_energy_j},
                     {"ed2p", m.summary.ed2p},
                     {"theoretical_min_j", m.summary.theoretical_min_j},
                     {"energy_gap", m.summary.energy_gap},
                     {"ft_overhead", m.summary.ft_overhead}});
  }
  return {{"baseline", "original"}, {"modes", modes}, {"config", config_echo(config)}};
}

std::string campaign_csv(const std::vector<sim::CampaignRow>& rows) {
  std::string out = "scheme,trials,correct,correct_fraction,overhead_fraction,faults\n";
  for (const sim::CampaignRow& r : rows) {
    out += std::string(sim::to_string(r.scheme)) + ',' + std::to_string(r.trials) + ',' +
           std::to_string(r.correct) + ',' + format_double(r.correct_fraction) + ',' +
           format_double(r.overhead_fraction) + ',' + std::to_string(r.faults) + '\n';
  }
  return out;
}

void validate_summary(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "expected an object");
  require(doc, "", "status", json::value_t::string);
  for (const char* key : {"total_time_s", "total_energy_j", "ed2p", "ft_overhead",
                          "theoretical_min_j", "energy_gap", "mean_prediction_error"})
    require(doc, "", key, json::value_t::number_float);
  require(doc, "", "energy", json::value_t::object);
  require(doc, "", "config", json::value_t::object);
  validate_echo(doc["config"]);
}

void validate_comparison(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "expected an object");
  require(doc, "", "baseline", json::value_t::string);
  require(doc, "", "modes", json::value_t::array);
  require(doc, "", "config", json::value_t::object);
  const json& modes = doc["modes"];
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const std::string p = "/modes/" + std::to_string(i);
    if (!modes[i].is_object()) throw ConfigError(p, "expected an object");
    require(modes[i], p, "mode", json::value_t::string);
    if (!scheduler::parse_mode(modes[i]["mode"].get<std::string>()))
      throw ConfigError(p + "/mode", "unknown mode");
    for (const char* key : {"energy_saving_pct", "ed2p_reduction_pct", "speedup", "total_time_s",
                            "total_energy_j", "ed2p", "theoretical_min_j", "energy_gap",
                            "ft_overhead"})
      require(modes[i], p, key, json::value_t::number_float);
  }
  validate_echo(doc["config"]);
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace slackwise::cli
