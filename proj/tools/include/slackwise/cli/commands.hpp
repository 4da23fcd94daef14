#pragma once

#include <iosfwd>

#include "slackwise/cli/config.hpp"

namespace slackwise::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumericBreakdown = 3,
  kExitUnrecoverable = 4,
};

int exit_code(sim::RunStatus s);

/// trace.csv and summary.json in config.out_dir.
int cmd_run(const CliConfig& config, std::ostream& log);
/// pareto.csv over config.r_grid.
int cmd_sweep(const CliConfig& config, std::ostream& log);
/// comparison.json for config.modes against Original.
int cmd_compare(const CliConfig& config, std::ostream& log);
/// campaign.csv over config.schemes with config.trials runs each.
int cmd_campaign(const CliConfig& config, std::ostream& log);

/// Reads a config file into a JSON document; ConfigError on failure.
nlohmann::json load_config_file(const std::string& path);

/// Whole command line: parse flags, load and validate config, dispatch.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace slackwise::cli
