#include "slackwise/cli/config.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <set>

namespace slackwise::cli {

using json = nlohmann::json;

namespace {

std::string child(const std::string& ptr, std::string_view key) {
  std::string out = ptr + "/";
  for (char ch : key) {
    if (ch == '~') out += "~0";
    else if (ch == '/') out += "~1";
    else out += ch;
  }
  return out;
}

std::string child(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

double as_number(const json& v, const std::string& ptr) {
  if (!v.is_number()) throw ConfigError(ptr, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(ptr, "expected a finite number");
  return x;
}

std::uint64_t as_uint(const json& v, const std::string& ptr) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
  throw ConfigError(ptr, "expected a non-negative integer");
}

int as_mhz(const json& v, const std::string& ptr) {
  const std::uint64_t x = as_uint(v, ptr);
  if (x > 1000000) throw ConfigError(ptr, "frequency out of range");
  return static_cast<int>(x);
}

bool as_bool(const json& v, const std::string& ptr) {
  if (!v.is_boolean()) throw ConfigError(ptr, "expected true or false");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& ptr) {
  if (!v.is_string()) throw ConfigError(ptr, "expected a string");
  return v.get<std::string>();
}

template <typename T, typename Parse>
T as_enum(const json& v, const std::string& ptr, Parse parse, const char* what) {
  const std::string s = as_string(v, ptr);
  if (auto r = parse(s)) return *r;
  throw ConfigError(ptr, "unknown " + std::string(what) + " '" + s + "'");
}

// A JSON object whose keys are checked against an allow-list up front.
class Object {
 public:
  Object(const json& j, std::string ptr, std::initializer_list<std::string_view> allowed)
      : j_(j), ptr_(std::move(ptr)) {
    if (!j.is_object()) throw ConfigError(ptr_, "expected an object");
    const std::set<std::string_view> ok(allowed);
    for (const auto& [key, value] : j.items())
      if (ok.count(key) == 0) throw ConfigError(child(ptr_, key), "unknown key");
  }
  const json* find(std::string_view key) const {
    auto it = j_.find(std::string(key));
    return it == j_.end() ? nullptr : &*it;
  }
  std::string at(std::string_view key) const { return child(ptr_, key); }

  template <typename F>
  void with(std::string_view key, F f) const {
    if (const json* v = find(key)) f(*v, at(key));
  }

 private:
  const json& j_;
  std::string ptr_;
};

std::optional<predictor::PredictorKind> parse_predictor(std::string_view s) {
  if (s == "enhanced") return predictor::PredictorKind::Enhanced;
  if (s == "baseline") return predictor::PredictorKind::Baseline;
  return std::nullopt;
}

std::string_view predictor_name(predictor::PredictorKind k) {
  return k == predictor::PredictorKind::Enhanced ? "enhanced" : "baseline";
}

power::ProcessorModel parse_processor(const json& j, const std::string& ptr,
                                      power::ProcessorModel m) {
  const Object o(j, ptr,
                 {"name", "f_base_mhz", "f_min_mhz", "f_max_mhz", "step_mhz", "p_total_w", "d",
                  "alpha", "dvfs_latency_s", "gamma", "pd_rate", "pu_rate", "tmu_rate",
                  "checksum_rate"});
  o.with("name", [&](const json& v, const std::string& p) { m.name = as_string(v, p); });
  o.with("f_base_mhz", [&](const json& v, const std::string& p) { m.f_base = as_mhz(v, p); });
  o.with("f_min_mhz", [&](const json& v, const std::string& p) { m.f_min = as_mhz(v, p); });
  o.with("f_max_mhz", [&](const json& v, const std::string& p) { m.f_max = as_mhz(v, p); });
  o.with("step_mhz", [&](const json& v, const std::string& p) { m.step = as_mhz(v, p); });
  o.with("p_total_w", [&](const json& v, const std::string& p) { m.p_total = as_number(v, p); });
  o.with("d", [&](const json& v, const std::string& p) { m.d = as_number(v, p); });
  o.with("gamma", [&](const json& v, const std::string& p) { m.gamma = as_number(v, p); });
  o.with("dvfs_latency_s",
         [&](const json& v, const std::string& p) { m.dvfs_latency_s = as_number(v, p); });
  o.with("checksum_rate",
         [&](const json& v, const std::string& p) { m.checksum_rate = as_number(v, p); });
  const std::pair<const char*, TaskKind> rates[] = {
      {"pd_rate", TaskKind::PD}, {"pu_rate", TaskKind::PU}, {"tmu_rate", TaskKind::TMU}};
  for (const auto& [key, task] : rates)
    o.with(key, [&](const json& v, const std::string& p) {
      m.task_rate[index(task)] = as_number(v, p);
      if (m.task_rate[index(task)] < 0) throw ConfigError(p, "rates must be >= 0");
    });
  o.with("alpha", [&](const json& v, const std::string& p) {
    if (!v.is_array() || v.empty()) throw ConfigError(p, "expected a non-empty array");
    m.alpha_curve.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string pi = child(p, i);
      const Object pt(v[i], pi, {"f_mhz", "alpha"});
      power::AlphaPoint a;
      pt.with("f_mhz", [&](const json& x, const std::string& px) { a.f_mhz = as_number(x, px); });
      pt.with("alpha", [&](const json& x, const std::string& px) { a.alpha = as_number(x, px); });
      m.alpha_curve.push_back(a);
    }
  });
  try {
    m.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(ptr, e.what());
  }
  return m;
}

coverage::ErrorRateTable parse_rates(const json& j, const std::string& ptr) {
  const Object o(j, ptr, {"0d", "1d", "2d"});
  std::array<std::vector<coverage::Breakpoint>, 3> curves;
  for (ErrorKind k : kErrorKinds) {
    o.with(to_string(k), [&](const json& v, const std::string& p) {
      if (!v.is_array()) throw ConfigError(p, "expected an array of breakpoints");
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string pi = child(p, i);
        const Object pt(v[i], pi, {"f_mhz", "rate"});
        coverage::Breakpoint b;
        pt.with("f_mhz", [&](const json& x, const std::string& px) { b.f_mhz = as_number(x, px); });
        pt.with("rate", [&](const json& x, const std::string& px) { b.rate = as_number(x, px); });
        curves[index(k)].push_back(b);
      }
    });
  }
  try {
    return coverage::ErrorRateTable(curves);
  } catch (const InvalidArgument& e) {
    throw ConfigError(ptr, e.what());
  }
}

std::vector<double> parse_grid_value(const json& v, const std::string& p) {
  std::vector<double> grid;
  if (v.is_string()) {
    try {
      grid = parse_r_grid(v.get<std::string>());
    } catch (const InvalidArgument& e) {
      throw ConfigError(p, e.what());
    }
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) grid.push_back(as_number(v[i], child(p, i)));
  } else {
    throw ConfigError(p, "expected an array or a start:step:stop string");
  }
  if (grid.empty()) throw ConfigError(p, "grid must not be empty");
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (!(grid[i] >= 0 && grid[i] <= 1)) throw ConfigError(child(p, i), "r must be in [0, 1]");
  return grid;
}

Mode mode_from_aliases(bool reclaim, bool overclock, bool autoboost, const std::string& ptr) {
  if (!reclaim && !overclock && !autoboost) return Mode::Original;
  if (!reclaim && !overclock && autoboost) return Mode::R2H;
  if (reclaim && !overclock && !autoboost) return Mode::SR;
  if (reclaim && overclock && !autoboost) return Mode::BSR;
  throw ConfigError(ptr, "reclaim_slack/overclock/autoboost combination matches no mode");
}

std::string fmt_g(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

}  // namespace

std::vector<double> CliConfig::default_r_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 20; ++i) g.push_back(std::stod(fmt_g(0.05 * i, 12)));
  return g;
}

std::vector<double> parse_r_grid(std::string_view text) {
  const std::string s(text);
  std::vector<double> out;
  auto number = [&](const std::string& part) {
    std::size_t used = 0;
    double x = 0;
    try {
      x = std::stod(part, &used);
    } catch (const std::exception&) {
      throw InvalidArgument("bad number '" + part + "' in grid");
    }
    if (used != part.size()) throw InvalidArgument("bad number '" + part + "' in grid");
    return x;
  };
  if (s.find(':') != std::string::npos) {
    const std::size_t a = s.find(':'), b = s.find(':', a + 1);
    if (b == std::string::npos || s.find(':', b + 1) != std::string::npos)
      throw InvalidArgument("grid range must be start:step:stop");
    const double start = number(s.substr(0, a));
    const double step = number(s.substr(a + 1, b - a - 1));
    const double stop = number(s.substr(b + 1));
    if (!(step > 0) || stop < start) throw InvalidArgument("grid needs step > 0 and stop >= start");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i)
      out.push_back(std::stod(fmt_g(start + step * static_cast<double>(i), 12)));
    return out;
  }
  if (s.empty()) throw InvalidArgument("empty grid");
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t comma = s.find(',', pos);
    const std::string part = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    out.push_back(number(part));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

void merge_into(json& base, const json& patch) {
  if (!base.is_object() || !patch.is_object()) {
    base = patch;
    return;
  }
  for (const auto& [key, value] : patch.items()) {
    if (value.is_object() && base.contains(key) && base[key].is_object())
      merge_into(base[key], value);
    else
      base[key] = value;
  }
}

CliConfig parse_config(const json& doc) {
  CliConfig c;
  sim::SimConfig& s = c.sim;
  const Object o(doc, "",
                 {"alg", "n", "b", "mode", "r", "seed", "engine", "numeric_n", "noise_sigma",
                  "drift", "predictor", "abft", "fc_desired", "coverage_slots", "recovery",
                  "max_recoveries", "fault_magnitude", "tau_check", "link", "cpu", "gpu",
                  "gpu_rates", "reclaim_slack", "reclamation_ratio", "overclock", "autoboost",
                  "col_ft", "row_ft", "r_grid", "modes", "trials", "schemes", "out_dir"});

  o.with("alg", [&](const json& v, const std::string& p) {
    s.kind = as_enum<DecompositionKind>(v, p, parse_decomposition, "decomposition");
  });
  o.with("n", [&](const json& v, const std::string& p) { s.n = as_uint(v, p); });
  o.with("b", [&](const json& v, const std::string& p) { s.b = as_uint(v, p); });
  if (s.b == 0) throw ConfigError(o.at("b"), "block size must be positive");
  if (s.n < s.b) throw ConfigError(o.at(o.find("n") ? "n" : "b"), "need n >= b");
  o.with("seed", [&](const json& v, const std::string& p) { s.seed = as_uint(v, p); });
  o.with("engine", [&](const json& v, const std::string& p) {
    s.engine = as_enum<sim::Engine>(v, p, sim::parse_engine, "engine");
  });
  o.with("numeric_n", [&](const json& v, const std::string& p) {
    s.numeric_n = as_uint(v, p);
    if (s.numeric_n < 2) throw ConfigError(p, "numeric_n must be >= 2");
  });
  o.with("noise_sigma", [&](const json& v, const std::string& p) {
    s.noise_sigma = as_number(v, p);
    if (s.noise_sigma < 0) throw ConfigError(p, "noise_sigma must be >= 0");
  });
  o.with("drift", [&](const json& v, const std::string& p) {
    const Object d(v, p, {"cpu", "gpu"});
    d.with("cpu", [&](const json& x, const std::string& px) { s.drift.cpu = as_number(x, px); });
    d.with("gpu", [&](const json& x, const std::string& px) { s.drift.gpu = as_number(x, px); });
    for (const char* key : {"cpu", "gpu"}) {
      const double a = std::string_view(key) == "cpu" ? s.drift.cpu : s.drift.gpu;
      if (!(a >= 0 && a < 1)) throw ConfigError(d.at(key), "drift must be in [0, 1)");
    }
  });
  o.with("predictor", [&](const json& v, const std::string& p) {
    s.predictor = as_enum<predictor::PredictorKind>(v, p, parse_predictor, "predictor");
  });
  o.with("fc_desired", [&](const json& v, const std::string& p) {
    s.fc_desired = as_number(v, p);
    if (!(s.fc_desired > 0 && s.fc_desired <= 1)) throw ConfigError(p, "must be in (0, 1]");
  });
  o.with("coverage_slots", [&](const json& v, const std::string& p) {
    s.coverage_slots = as_enum<sim::SlotPolicy>(v, p, sim::parse_slot_policy, "slot policy");
  });
  o.with("recovery", [&](const json& v, const std::string& p) {
    s.recovery = as_enum<sim::Recovery>(v, p, sim::parse_recovery, "recovery policy");
  });
  o.with("max_recoveries", [&](const json& v, const std::string& p) {
    const std::uint64_t x = as_uint(v, p);
    if (x > 1000) throw ConfigError(p, "at most 1000 recoveries");
    s.max_recoveries = static_cast<int>(x);
  });
  o.with("fault_magnitude", [&](const json& v, const std::string& p) {
    s.fault_magnitude = as_number(v, p);
    if (!(s.fault_magnitude > 0)) throw ConfigError(p, "must be positive");
  });
  o.with("tau_check", [&](const json& v, const std::string& p) {
    s.tau_check = as_number(v, p);
    if (!(s.tau_check > 0)) throw ConfigError(p, "must be positive");
  });
  o.with("link", [&](const json& v, const std::string& p) {
    const Object l(v, p, {"bandwidth_bytes_per_s", "latency_s"});
    l.with("bandwidth_bytes_per_s", [&](const json& x, const std::string& px) {
      s.link.bandwidth_bytes_per_s = as_number(x, px);
      if (!(s.link.bandwidth_bytes_per_s > 0)) throw ConfigError(px, "must be positive");
    });
    l.with("latency_s", [&](const json& x, const std::string& px) {
      s.link.latency_s = as_number(x, px);
      if (s.link.latency_s < 0) throw ConfigError(px, "must be >= 0");
    });
  });
  o.with("cpu", [&](const json& v, const std::string& p) { s.cpu = parse_processor(v, p, s.cpu); });
  o.with("gpu", [&](const json& v, const std::string& p) { s.gpu = parse_processor(v, p, s.gpu); });
  o.with("gpu_rates", [&](const json& v, const std::string& p) { s.gpu_rates = parse_rates(v, p); });

  // Mode and its alias flags.
  std::optional<Mode> mode;
  o.with("mode", [&](const json& v, const std::string& p) {
    mode = as_enum<Mode>(v, p, scheduler::parse_mode, "mode");
  });
  std::optional<bool> reclaim, overclock, autoboost;
  o.with("reclaim_slack", [&](const json& v, const std::string& p) { reclaim = as_bool(v, p); });
  o.with("overclock", [&](const json& v, const std::string& p) { overclock = as_bool(v, p); });
  o.with("autoboost", [&](const json& v, const std::string& p) { autoboost = as_bool(v, p); });
  if (reclaim || overclock || autoboost) {
    const std::string first = o.at(reclaim ? "reclaim_slack" : overclock ? "overclock" : "autoboost");
    const Mode derived = mode_from_aliases(reclaim.value_or(false), overclock.value_or(false),
                                           autoboost.value_or(false), first);
    if (mode && *mode != derived)
      throw ConfigError(o.at("mode"), "conflicts with reclaim_slack/overclock/autoboost");
    mode = derived;
  }
  if (mode) s.mode = *mode;

  std::optional<double> r;
  for (const char* key : {"r", "reclamation_ratio"}) {
    o.with(key, [&](const json& v, const std::string& p) {
      const double x = as_number(v, p);
      if (!(x >= 0 && x <= 1)) throw ConfigError(p, "reclamation ratio must be in [0, 1]");
      if (r && *r != x) throw ConfigError(p, "conflicts with r");
      r = x;
    });
  }
  if (r) {
    if (s.mode == Mode::SR && *r != 0)
      throw ConfigError(o.at(o.find("r") ? "r" : "reclamation_ratio"), "sr reclaims with r = 0");
    s.r = *r;
  }

  std::optional<sim::AbftPolicy> abft;
  o.with("abft", [&](const json& v, const std::string& p) {
    abft = as_enum<sim::AbftPolicy>(v, p, sim::parse_abft_policy, "abft policy");
  });
  std::optional<bool> col_ft, row_ft;
  o.with("col_ft", [&](const json& v, const std::string& p) { col_ft = as_bool(v, p); });
  o.with("row_ft", [&](const json& v, const std::string& p) { row_ft = as_bool(v, p); });
  if (col_ft || row_ft) {
    const bool col = col_ft.value_or(false), row = row_ft.value_or(false);
    if (row && !col) throw ConfigError(o.at("row_ft"), "row checksums require col_ft");
    const sim::AbftPolicy derived = !col ? sim::AbftPolicy::None
                                    : row ? sim::AbftPolicy::Adaptive
                                          : sim::AbftPolicy::SingleSide;
    if (abft) {
      const bool ok = *abft == derived ||
                      (derived == sim::AbftPolicy::Adaptive && *abft == sim::AbftPolicy::Full);
      if (!ok) throw ConfigError(o.at("abft"), "conflicts with col_ft/row_ft");
    } else {
      abft = derived;
    }
  }
  if (abft) s.abft = *abft;

  o.with("r_grid", [&](const json& v, const std::string& p) { c.r_grid = parse_grid_value(v, p); });
  o.with("modes", [&](const json& v, const std::string& p) {
    if (!v.is_array() || v.empty()) throw ConfigError(p, "expected a non-empty array of modes");
    c.modes.clear();
    for (std::size_t i = 0; i < v.size(); ++i)
      c.modes.push_back(as_enum<Mode>(v[i], child(p, i), scheduler::parse_mode, "mode"));
  });
  o.with("trials", [&](const json& v, const std::string& p) {
    c.trials = as_uint(v, p);
    if (c.trials == 0) throw ConfigError(p, "need at least one trial");
  });
  o.with("schemes", [&](const json& v, const std::string& p) {
    if (!v.is_array() || v.empty()) throw ConfigError(p, "expected a non-empty array of schemes");
    c.schemes.clear();
    for (std::size_t i = 0; i < v.size(); ++i)
      c.schemes.push_back(
          as_enum<sim::AbftPolicy>(v[i], child(p, i), sim::parse_abft_policy, "abft policy"));
  });
  o.with("out_dir", [&](const json& v, const std::string& p) { c.out_dir = as_string(v, p); });

  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("", e.what());
  }
  return c;
}

json to_json(const power::ProcessorModel& m) {
  json alpha = json::array();
  for (const auto& a : m.alpha_curve) alpha.push_back({{"f_mhz", a.f_mhz}, {"alpha", a.alpha}});
  return {{"name", m.name},
          {"f_base_mhz", m.f_base},
          {"f_min_mhz", m.f_min},
          {"f_max_mhz", m.f_max},
          {"step_mhz", m.step},
          {"p_total_w", m.p_total},
          {"d", m.d},
          {"alpha", alpha},
          {"dvfs_latency_s", m.dvfs_latency_s},
          {"gamma", m.gamma},
          {"pd_rate", m.task_rate[index(TaskKind::PD)]},
          {"pu_rate", m.task_rate[index(TaskKind::PU)]},
          {"tmu_rate", m.task_rate[index(TaskKind::TMU)]},
          {"checksum_rate", m.checksum_rate}};
}

json to_json(const coverage::ErrorRateTable& t) {
  json out = json::object();
  for (ErrorKind k : kErrorKinds) {
    json curve = json::array();
    for (const auto& b : t.curve(k)) curve.push_back({{"f_mhz", b.f_mhz}, {"rate", b.rate}});
    out[std::string(to_string(k))] = curve;
  }
  return out;
}

json to_json(const CliConfig& c) {
  const sim::SimConfig& s = c.sim;
  json modes = json::array(), schemes = json::array();
  for (Mode m : c.modes) modes.push_back(std::string(to_string(m)));
  for (sim::AbftPolicy p : c.schemes) schemes.push_back(std::string(sim::to_string(p)));
  return {{"alg", std::string(to_string(s.kind))},
          {"n", s.n},
          {"b", s.b},
          {"mode", std::string(to_string(s.mode))},
          {"r", s.r},
          {"seed", s.seed},
          {"engine", std::string(sim::to_string(s.engine))},
          {"numeric_n", s.numeric_n},
          {"noise_sigma", s.noise_sigma},
          {"drift", {{"cpu", s.drift.cpu}, {"gpu", s.drift.gpu}}},
          {"predictor", std::string(predictor_name(s.predictor))},
          {"abft", std::string(sim::to_string(s.abft))},
          {"fc_desired", s.fc_desired},
          {"coverage_slots", std::string(sim::to_string(s.coverage_slots))},
          {"recovery", std::string(sim::to_string(s.recovery))},
          {"max_recoveries", s.max_recoveries},
          {"fault_magnitude", s.fault_magnitude},
          {"tau_check", s.tau_check},
          {"link",
           {{"bandwidth_bytes_per_s", s.link.bandwidth_bytes_per_s},
            {"latency_s", s.link.latency_s}}},
          {"cpu", to_json(s.cpu)},
          {"gpu", to_json(s.gpu)},
          {"gpu_rates", to_json(s.gpu_rates)},
          {"r_grid", c.r_grid},
          {"modes", modes},
          {"trials", c.trials},
          {"schemes", schemes},
          {"out_dir", c.out_dir}};
}

}  // namespace slackwise::cli
