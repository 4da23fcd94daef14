#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "slackwise/simulator.hpp"

namespace slackwise::cli {

using scheduler::Mode;

/// Schema violation. `pointer` is the JSON pointer of the offending value.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string pointer, const std::string& what)
      : std::runtime_error(pointer + ": " + what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

/// Everything a command needs: the run configuration plus the per-command
/// experiment settings.
struct CliConfig {
  sim::SimConfig sim;
  std::vector<double> r_grid = default_r_grid();
  std::vector<Mode> modes{Mode::Original, Mode::R2H, Mode::SR, Mode::BSR};
  std::size_t trials = 2000;
  std::vector<sim::AbftPolicy> schemes{sim::AbftPolicy::None, sim::AbftPolicy::SingleSide,
                                       sim::AbftPolicy::Full, sim::AbftPolicy::Adaptive};
  std::string out_dir = ".";

  static std::vector<double> default_r_grid();
};

/// Parses a config document. All keys are optional; unknown keys, wrong
/// types, out-of-range values and inconsistent mode aliases raise
/// ConfigError.
CliConfig parse_config(const nlohmann::json& doc);

/// Canonical document for a configuration; parse_config(to_json(c)) == c.
nlohmann::json to_json(const CliConfig& c);

nlohmann::json to_json(const power::ProcessorModel& m);
nlohmann::json to_json(const coverage::ErrorRateTable& t);

/// "start:step:stop" (inclusive) or a comma-separated list.
std::vector<double> parse_r_grid(std::string_view text);

/// Applies `patch` on top of `base`, merging nested objects key by key.
void merge_into(nlohmann::json& base, const nlohmann::json& patch);

}  // namespace slackwise::cli
