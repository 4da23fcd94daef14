#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "slackwise/cli/commands.hpp"
#include "slackwise/cli/config.hpp"
#include "slackwise/cli/output.hpp"

using namespace slackwise;
using namespace slackwise::cli;
using nlohmann::json;

namespace {

std::string pointer_of_error(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.pointer();
  }
  return "<accepted>";
}

int run(std::vector<std::string> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "slackwise");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (err_text) *err_text = err.str();
  return code;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name)
      : path(std::filesystem::temp_directory_path() / ("slackwise-test-" + name)) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config round-trips through JSON") {
    CliConfig c;
    c.sim.kind = DecompositionKind::QR;
    c.sim.n = 4096;
    c.sim.b = 256;
    c.sim.r = 0.35;
    c.sim.drift = {0.1, 0.05};
    c.sim.abft = sim::AbftPolicy::Full;
    c.sim.gpu.alpha_curve = {{1300, 0.95}, {2000, 0.85}};
    c.modes = {scheduler::Mode::Original, scheduler::Mode::BSR};
    c.trials = 7;
    const json doc = to_json(c);
    CHECK(to_json(parse_config(doc)) == doc);
    CHECK(to_json(parse_config(json::object())) == to_json(CliConfig{}));
  }

  TEST_CASE("schema errors carry a JSON pointer") {
    CHECK(pointer_of_error({{"colour", 1}}) == "/colour");
    CHECK(pointer_of_error({{"n", "big"}}) == "/n");
    CHECK(pointer_of_error({{"r", 1.5}}) == "/r");
    CHECK(pointer_of_error({{"gpu", {{"p_total_w", "x"}}}}) == "/gpu/p_total_w");
    CHECK(pointer_of_error({{"drift", {{"gpu", 0.1}, {"mem", 0.1}}}}) == "/drift/mem");
    CHECK(pointer_of_error({{"modes", {"original", "warp"}}}) == "/modes/1");
  }

  TEST_CASE("mode aliases") {
    auto mode_of = [](const json& doc) { return parse_config(doc).sim.mode; };
    using scheduler::Mode;
    CHECK(mode_of({{"reclaim_slack", false}, {"overclock", false}, {"autoboost", false}}) ==
          Mode::Original);
    CHECK(mode_of({{"autoboost", true}}) == Mode::R2H);
    CHECK(mode_of({{"reclaim_slack", true}}) == Mode::SR);
    CHECK(mode_of({{"reclaim_slack", true}, {"overclock", true}}) == Mode::BSR);
    CHECK(mode_of({{"mode", "bsr"}, {"reclaim_slack", true}, {"overclock", true}}) == Mode::BSR);
    CHECK(pointer_of_error({{"mode", "sr"}, {"autoboost", true}}) == "/mode");
    CHECK(pointer_of_error({{"overclock", true}, {"autoboost", true}}) == "/overclock");
    CHECK(parse_config({{"reclamation_ratio", 0.4}}).sim.r == 0.4);
    CHECK(pointer_of_error({{"r", 0.4}, {"reclamation_ratio", 0.5}}) != "<accepted>");
    CHECK(pointer_of_error({{"mode", "sr"}, {"r", 0.5}}) == "/r");
  }

  TEST_CASE("ABFT aliases") {
    auto abft_of = [](const json& doc) { return parse_config(doc).sim.abft; };
    CHECK(abft_of({{"col_ft", false}}) == sim::AbftPolicy::None);
    CHECK(abft_of({{"col_ft", true}}) == sim::AbftPolicy::SingleSide);
    CHECK(abft_of({{"col_ft", true}, {"row_ft", true}}) == sim::AbftPolicy::Adaptive);
    CHECK(abft_of({{"abft", "full"}, {"col_ft", true}, {"row_ft", true}}) == sim::AbftPolicy::Full);
    CHECK(pointer_of_error({{"row_ft", true}}) == "/row_ft");
    CHECK(pointer_of_error({{"abft", "none"}, {"col_ft", true}}) == "/abft");
  }

  TEST_CASE("r grids") {
    const auto g = parse_r_grid("0:0.05:1");
    REQUIRE(g.size() == 21);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 1.0);
    CHECK(g[7] == doctest::Approx(0.35));
    CHECK(parse_r_grid("0.1,0.5") == std::vector<double>{0.1, 0.5});
    CHECK(CliConfig::default_r_grid().size() == 21);
    CHECK_THROWS(parse_r_grid(""));
    CHECK_THROWS(parse_r_grid("0:0:1"));
  }

  TEST_CASE("exit codes") {
    CHECK(exit_code(sim::RunStatus::Ok) == 0);
    CHECK(exit_code(sim::RunStatus::NumericBreakdown) != 0);
    CHECK(exit_code(sim::RunStatus::Unrecoverable) != 0);
    std::string err;
    CHECK(run({"run", "--r", "1.5"}, &err) == kExitConfig);
    CHECK(err.find("/r") != std::string::npos);
    CHECK(run({"run", "--frobnicate"}) == kExitConfig);
    CHECK(run({"run", "--n", "abc"}) == kExitConfig);
    CHECK(run({}) == kExitConfig);
    CHECK(run({"run", "--config", "/nonexistent/slackwise.json"}) == kExitConfig);
  }

  TEST_CASE("trace CSV rows re-add to the summary") {
    sim::SimConfig c;
    c.n = 4096;
    c.b = 512;
    c.r = 0.25;
    const sim::RunResult r = sim::simulate_run(c);
    const std::string csv = trace_csv(r.trace);
    std::stringstream ss(csv);
    std::string line;
    std::getline(ss, line);
    CHECK(line == kTraceHeader);
    const std::size_t columns = split(std::string(kTraceHeader)).size();
    std::size_t rows = 0;
    double energy = 0, time = 0;
    while (std::getline(ss, line)) {
      const auto cells = split(line);
      REQUIRE(cells.size() == columns);
      for (std::size_t i = 14; i < 20; ++i) energy += std::stod(cells[i]);
      if (cells[1] == "idle") time += std::stod(cells[3]);
      ++rows;
    }
    CHECK(rows == 5 * r.trace.size());
    CHECK(energy == doctest::Approx(r.summary.total_energy_j).epsilon(1e-12));
    CHECK(time == doctest::Approx(r.summary.total_time_s).epsilon(1e-12));
  }

  TEST_CASE("doubles print shortest round-trip text") {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, 12345.678, 0.0})
      CHECK(std::stod(format_double(x)) == x);
    CHECK(format_double(0.5) == "0.5");
  }

  TEST_CASE("written documents validate") {
    CliConfig c;
    c.sim.n = 4096;
    const sim::RunResult r = sim::simulate_run(c.sim);
    const json summary = summary_json(c, r.summary);
    CHECK_NOTHROW(validate_summary(summary));
    CHECK_NOTHROW(validate_summary(json::parse(summary.dump())));
    json broken = summary;
    broken.erase("total_time_s");
    CHECK_THROWS_AS(validate_summary(broken), ConfigError);

    const json cmp = comparison_json(c, sim::compare_modes(c.sim, c.modes));
    CHECK_NOTHROW(validate_comparison(cmp));
    CHECK(cmp["modes"].size() == c.modes.size());
  }

  TEST_CASE("run is byte-for-byte repeatable") {
    TempDir a("run-a"), b("run-b");
    const std::vector<std::string> flags{"--alg", "lu", "--n", "1024", "--b", "128",
                                         "--mode", "bsr", "--r", "0.25", "--seed", "1"};
    auto with_out = [&](const TempDir& d) {
      std::vector<std::string> args{"run"};
      args.insert(args.end(), flags.begin(), flags.end());
      args.push_back("--out");
      args.push_back(d.path.string());
      return args;
    };
    REQUIRE(run(with_out(a)) == 0);
    REQUIRE(run(with_out(b)) == 0);
    for (const char* file : {"trace.csv", "summary.json"}) {
      const std::string x = slurp(a.path / file);
      CHECK(!x.empty());
      CHECK(x == slurp(b.path / file));
    }
  }

  TEST_CASE("sweep writes one row per grid point") {
    TempDir d("sweep");
    REQUIRE(run({"sweep", "--n", "4096", "--r-grid", "0:0.05:1", "--out", d.path.string()}) == 0);
    std::stringstream ss(slurp(d.path / "pareto.csv"));
    std::string line;
    std::getline(ss, line);
    std::size_t rows = 0;
    double first_energy = 0, min_energy = INFINITY, prev_time = INFINITY;
    while (std::getline(ss, line)) {
      const auto cells = split(line);
      const double t = std::stod(cells[1]), e = std::stod(cells[2]);
      if (rows == 0) first_energy = e;
      min_energy = std::min(min_energy, e);
      CHECK(t <= prev_time);
      prev_time = t;
      ++rows;
    }
    CHECK(rows == 21);
    CHECK(first_energy == min_energy);
  }
}
