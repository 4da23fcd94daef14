#include "slackwise/cli/commands.hpp"

#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "slackwise/cli/output.hpp"

namespace slackwise::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

int exit_code(sim::RunStatus s) {
  switch (s) {
    case sim::RunStatus::Ok: return kExitOk;
    case sim::RunStatus::NumericBreakdown: return kExitNumericBreakdown;
    case sim::RunStatus::Unrecoverable: return kExitUnrecoverable;
  }
  return kExitUnrecoverable;
}

namespace {

fs::path prepare_out(const CliConfig& c) {
  const fs::path dir(c.out_dir);
  fs::create_directories(dir);
  return dir;
}

int worst(int a, int b) { return std::max(a, b); }

}  // namespace

int cmd_run(const CliConfig& config, std::ostream& log) {
  const sim::RunResult result = sim::simulate_run(config.sim);
  const fs::path dir = prepare_out(config);
  write_atomic(dir / "trace.csv", trace_csv(result.trace));
  write_atomic(dir / "summary.json", summary_json(config, result.summary).dump(2) + "\n");
  log << "run: " << result.summary.iterations << " iterations, "
      << format_double(result.summary.total_time_s) << " s, "
      << format_double(result.summary.total_energy_j) << " J, status "
      << sim::to_string(result.summary.status) << "\n";
  if (!result.summary.message.empty()) log << "run: " << result.summary.message << "\n";
  return exit_code(result.summary.status);
}

int cmd_sweep(const CliConfig& config, std::ostream& log) {
  const auto points = sim::sweep_reclamation_ratio(config.sim, config.r_grid);
  const fs::path dir = prepare_out(config);
  write_atomic(dir / "pareto.csv", pareto_csv(points));
  int code = kExitOk;
  for (const auto& p : points) code = worst(code, exit_code(p.summary.status));
  log << "sweep: " << points.size() << " points\n";
  return code;
}

int cmd_compare(const CliConfig& config, std::ostream& log) {
  const auto rows = sim::compare_modes(config.sim, config.modes);
  const fs::path dir = prepare_out(config);
  write_atomic(dir / "comparison.json", comparison_json(config, rows).dump(2) + "\n");
  int code = kExitOk;
  for (const auto& r : rows) {
    code = worst(code, exit_code(r.summary.status));
    log << "compare: " << to_string(r.mode) << " saves " << format_double(r.energy_saving_pct)
        << "% energy\n";
  }
  return code;
}

int cmd_campaign(const CliConfig& config, std::ostream& log) {
  const auto rows = sim::fault_campaign(config.sim, config.trials, config.schemes);
  const fs::path dir = prepare_out(config);
  write_atomic(dir / "campaign.csv", campaign_csv(rows));
  for (const auto& r : rows)
    log << "campaign: " << sim::to_string(r.scheme) << " correct "
        << format_double(r.correct_fraction) << "\n";
  return kExitOk;
}

json load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("", "cannot read config file '" + path + "'");
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("config file is not valid JSON: ") + e.what());
  }
}

namespace {

enum class ValueType { String, Number, Uint, Bool, List };

struct FlagSpec {
  const char* flag;
  std::vector<const char*> path;  // JSON keys
  ValueType type;
  const char* help;
};

const std::vector<FlagSpec>& common_flags() {
  static const std::vector<FlagSpec> specs = {
      {"--alg", {"alg"}, ValueType::String, "Decomposition: cholesky, lu or qr"},
      {"--n", {"n"}, ValueType::Uint, "Matrix order"},
      {"--b", {"b"}, ValueType::Uint, "Block size"},
      {"--mode", {"mode"}, ValueType::String, "Energy mode: original, r2h, sr or bsr"},
      {"--r", {"r"}, ValueType::Number, "Reclamation ratio in [0, 1]"},
      {"--seed", {"seed"}, ValueType::Uint, "Random seed"},
      {"--engine", {"engine"}, ValueType::String, "analytic or numeric"},
      {"--numeric-n", {"numeric_n"}, ValueType::Uint,
       "Largest order factored for real; bigger runs use a proxy matrix"},
      {"--noise", {"noise_sigma"}, ValueType::Number, "Lognormal sigma of task-time noise"},
      {"--drift-cpu", {"drift", "cpu"}, ValueType::Number, "CPU efficiency drift amplitude"},
      {"--drift-gpu", {"drift", "gpu"}, ValueType::Number, "GPU efficiency drift amplitude"},
      {"--predictor", {"predictor"}, ValueType::String, "enhanced or baseline"},
      {"--abft", {"abft"}, ValueType::String, "adaptive, none, single or full"},
      {"--fc-desired", {"fc_desired"}, ValueType::Number, "Required fault coverage"},
      {"--slots", {"coverage_slots"}, ValueType::String, "Coverage slots: trailing or matrix"},
      {"--recovery", {"recovery"}, ValueType::String, "recompute or abort"},
      {"--max-recoveries", {"max_recoveries"}, ValueType::Uint, "Recomputes per iteration"},
      {"--fault-magnitude", {"fault_magnitude"}, ValueType::Number, "Injected error size"},
      {"--tau-check", {"tau_check"}, ValueType::Number, "Checksum tolerance multiplier"},
      {"--link-bandwidth", {"link", "bandwidth_bytes_per_s"}, ValueType::Number,
       "Host-device bandwidth, bytes/s"},
      {"--link-latency", {"link", "latency_s"}, ValueType::Number, "Host-device latency, s"},
      {"--reclaim-slack", {"reclaim_slack"}, ValueType::Bool, "Mode alias"},
      {"--reclamation-ratio", {"reclamation_ratio"}, ValueType::Number, "Alias of --r"},
      {"--overclock", {"overclock"}, ValueType::Bool, "Mode alias"},
      {"--autoboost", {"autoboost"}, ValueType::Bool, "Mode alias"},
      {"--col-ft", {"col_ft"}, ValueType::Bool, "Column checksums (abft alias)"},
      {"--row-ft", {"row_ft"}, ValueType::Bool, "Row checksums (abft alias)"},
      {"--out", {"out_dir"}, ValueType::String, "Output directory"},
  };
  return specs;
}

std::string pointer_of(const std::vector<const char*>& path) {
  std::string p;
  for (const char* k : path) p += std::string("/") + k;
  return p;
}

std::string default_text(const FlagSpec& spec, const json& defaults) {
  const json* v = &defaults;
  for (const char* k : spec.path) {
    if (!v->is_object() || !v->contains(k)) return "unset";
    v = &(*v)[k];
  }
  if (v->is_string()) return v->get<std::string>();
  if (v->is_array()) {
    std::string s;
    for (const auto& x : *v) s += (s.empty() ? "" : ",") + (x.is_string() ? x.get<std::string>() : x.dump());
    return s;
  }
  return v->dump();
}

json convert(const FlagSpec& spec, const std::string& raw) {
  const std::string ptr = pointer_of(spec.path);
  switch (spec.type) {
    case ValueType::String: return raw;
    case ValueType::Number: {
      std::size_t used = 0;
      double x = 0;
      try {
        x = std::stod(raw, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != raw.size() || raw.empty()) throw ConfigError(ptr, "expected a number, got '" + raw + "'");
      return x;
    }
    case ValueType::Uint: {
      std::size_t used = 0;
      unsigned long long x = 0;
      try {
        x = raw.empty() || raw[0] == '-' ? 0 : std::stoull(raw, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != raw.size() || raw.empty())
        throw ConfigError(ptr, "expected a non-negative integer, got '" + raw + "'");
      return static_cast<std::uint64_t>(x);
    }
    case ValueType::Bool:
      if (raw == "true" || raw == "1" || raw == "on") return true;
      if (raw == "false" || raw == "0" || raw == "off") return false;
      throw ConfigError(ptr, "expected true or false, got '" + raw + "'");
    case ValueType::List: {
      json arr = json::array();
      std::stringstream ss(raw);
      std::string item;
      while (std::getline(ss, item, ',')) arr.push_back(item);
      return arr;
    }
  }
  return raw;
}

void set_path(json& doc, const std::vector<const char*>& path, json value) {
  json* v = &doc;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) v = &(*v)[path[i]];
  (*v)[path.back()] = std::move(value);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Energy-saving schedule simulator for blocked CPU-GPU factorizations"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  const json defaults = to_json(CliConfig{});
  struct Bound {
    const FlagSpec* spec;
    CLI::Option* opt;
    std::string* value;
  };
  std::deque<std::string> storage;
  std::vector<std::pair<CLI::App*, std::vector<Bound>>> subs;
  std::deque<std::string> config_paths;

  // Command-specific flags.
  static const FlagSpec grid_flag{"--r-grid", {"r_grid"}, ValueType::String,
                                  "Sweep grid: start:step:stop or a comma list"};
  static const FlagSpec modes_flag{"--modes", {"modes"}, ValueType::List,
                                   "Comma-separated modes to compare"};
  static const FlagSpec trials_flag{"--trials", {"trials"}, ValueType::Uint, "Runs per scheme"};
  static const FlagSpec schemes_flag{"--schemes", {"schemes"}, ValueType::List,
                                     "Comma-separated ABFT policies"};

  const std::vector<std::pair<const char*, const char*>> commands = {
      {"run", "Simulate one run; writes trace.csv and summary.json"},
      {"sweep", "Sweep the reclamation ratio; writes pareto.csv"},
      {"compare", "Compare modes against original; writes comparison.json"},
      {"campaign", "Repeat numeric runs per ABFT policy; writes campaign.csv"},
  };
  for (const auto& [name, desc] : commands) {
    CLI::App* sub = app.add_subcommand(name, desc);
    config_paths.emplace_back();
    sub->add_option("--config", config_paths.back(), "JSON config file; flags override it");
    std::vector<const FlagSpec*> specs;
    for (const FlagSpec& s : common_flags()) specs.push_back(&s);
    const std::string n = name;
    if (n == "sweep") specs.push_back(&grid_flag);
    if (n == "compare") specs.push_back(&modes_flag);
    if (n == "campaign") {
      specs.push_back(&trials_flag);
      specs.push_back(&schemes_flag);
    }
    std::vector<Bound> bound;
    for (const FlagSpec* s : specs) {
      storage.emplace_back();
      CLI::Option* opt = sub->add_option(s->flag, storage.back(), s->help);
      opt->default_str(default_text(*s, defaults));
      bound.push_back({s, opt, &storage.back()});
    }
    subs.emplace_back(sub, std::move(bound));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    CLI::App* sub = subs[i].first;
    if (!sub->parsed()) continue;
    try {
      json doc = json::object();
      if (!config_paths[i].empty()) doc = load_config_file(config_paths[i]);
      if (!doc.is_object()) throw ConfigError("", "config document must be an object");
      json patch = json::object();
      for (const Bound& b : subs[i].second)
        if (b.opt->count() > 0) set_path(patch, b.spec->path, convert(*b.spec, *b.value));
      merge_into(doc, patch);
      const CliConfig config = parse_config(doc);
      const std::string name = sub->get_name();
      if (name == "run") return cmd_run(config, out);
      if (name == "sweep") return cmd_sweep(config, out);
      if (name == "compare") return cmd_compare(config, out);
      return cmd_campaign(config, out);
    } catch (const ConfigError& e) {
      err << "config error: " << e.what() << "\n";
      return kExitConfig;
    } catch (const InvalidArgument& e) {
      err << "invalid argument: " << e.what() << "\n";
      return kExitConfig;
    } catch (const NumericBreakdown& e) {
      err << "numeric breakdown: " << e.what() << "\n";
      return kExitNumericBreakdown;
    } catch (const UnrecoverableFault& e) {
      err << "unrecoverable fault: " << e.what() << "\n";
      return kExitUnrecoverable;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return kExitConfig;
}

}  // namespace slackwise::cli
