// One PASS/FAIL line per acceptance criterion. `--criterion N` runs one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "numeric_run.hpp"
#include "reference.hpp"
#include "slackwise/cli/commands.hpp"
#include "slackwise/cli/config.hpp"
#include "slackwise/coverage.hpp"
#include "slackwise/factorization.hpp"
#include "slackwise/flops.hpp"
#include "slackwise/power.hpp"
#include "slackwise/simulator.hpp"

using namespace slackwise;
using linalg::DenseMatrix;
using power::ProcessorModel;
using scheduler::Mode;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string g(double x) { return fmt("%.4g", x); }

constexpr DecompositionKind kKinds[] = {DecompositionKind::Cholesky, DecompositionKind::LU,
                                        DecompositionKind::QR};

const char* kind_name(DecompositionKind k) {
  return k == DecompositionKind::Cholesky ? "cholesky" : k == DecompositionKind::LU ? "lu" : "qr";
}

// Energy of a run next to its theoretical floor.
struct FloorEntry {
  std::string label;
  double energy = 0;
  double floor = 0;
};
using FloorLog = std::vector<FloorEntry>;

void log_floor(FloorLog* log, std::string label, double energy, double w_cpu, double w_gpu,
               const ProcessorModel& cpu, const ProcessorModel& gpu) {
  if (!log) return;
  const double floor = power::theoretical_min_energy(w_cpu, w_gpu, power::peak_efficiency(cpu),
                                                     power::peak_efficiency(gpu));
  log->push_back({std::move(label), energy, floor});
}

// ---------------------------------------------------------------------------

Outcome factorization_correctness() {
  const auto start = std::chrono::steady_clock::now();
  double worst_diff = 0, worst_res = 0;
  for (DecompositionKind kind : kKinds)
    for (std::size_t n : {128u, 256u, 512u}) {
      const DenseMatrix a = linalg::generate_test_matrix(kind, n, 11 + n);
      linalg::FactorizationState s = linalg::begin_factorization(kind, a, 32);
      linalg::factorize_all(s);
      double diff = 0;
      switch (kind) {
        case DecompositionKind::LU:
          diff = testing::relative_difference(s.a, testing::reference_lu(a),
                                              [](std::size_t, std::size_t) { return true; });
          break;
        case DecompositionKind::Cholesky:
          diff = testing::relative_difference(s.a, testing::reference_cholesky(a),
                                              [](std::size_t i, std::size_t j) { return i >= j; });
          break;
        case DecompositionKind::QR:
          diff = testing::relative_difference(testing::normalized_r(s.a), testing::reference_qr_r(a),
                                              [](std::size_t i, std::size_t j) { return i <= j; });
          break;
      }
      worst_diff = std::max(worst_diff, diff);
      worst_res = std::max(worst_res, linalg::residual(a, s));
    }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst_diff <= 1e-10 && worst_res <= 1e-10 && secs < 10,
          "worst reference difference " + g(worst_diff) + ", worst residual " + g(worst_res) +
              " (limit 1e-10), " + fmt("%.2f", secs) + " s"};
}

Outcome ratio_table() {
  using K = DecompositionKind;
  using T = TaskKind;
  const double n = 8192, b = 64;
  struct Row {
    const char* name;
    K kind;
    T task;
    std::function<double(double)> formula;
  };
  const Row rows[] = {
      {"PD-Cho", K::Cholesky, T::PD, [](double) { return 1.0; }},
      {"TMU-Cho", K::Cholesky, T::TMU, [&](double k) { return (1 + k) * (1 - b / (n - k * b - b)); }},
      {"PD-LU", K::LU, T::PD, [&](double k) { return 1 - 6 * b / (3 * n - (3 * k - 1) * b); }},
      {"PU-LU", K::LU, T::PU, [&](double k) { return 1 - b / (n - k * b - b); }},
      {"TMU-LU", K::LU, T::TMU, [&](double k) { return 1 - 2 * b / (n - k * b); }},
      {"PD-QR", K::QR, T::PD, [&](double k) { return 1 - b / (6 * n - (6 * k + 1) * b); }},
      {"TMU-QR", K::QR, T::TMU,
       [&](double k) {
         const double lo = n - k * b - b, hi = n - k * b + b;
         return 1 - b / lo - b / hi + b * b / (lo * hi);
       }},
  };
  bool pass = true;
  std::string detail;
  for (const Row& r : rows) {
    double worst = 0;
    int fails = 0;
    for (int k = 1; k <= 50; ++k) {
      const double tol = 3 * std::pow(b / (n - k * b), 2);
      const double ratio = linalg::task_flops(r.kind, r.task, 8192, 64, k + 1) /
                           linalg::task_flops(r.kind, r.task, 8192, 64, k);
      const double err = std::abs(ratio - r.formula(k));
      worst = std::max(worst, err / tol);
      fails += err > tol;
    }
    pass = pass && fails == 0;
    detail += std::string(detail.empty() ? "" : "; ") + r.name + " " +
              (fails == 0 ? "ok" : std::to_string(fails) + "/50 over") + " (worst " + g(worst) +
              "x tol)";
  }
  return {pass, detail};
}

Outcome coverage_oracle() {
  struct Point {
    bool full;
    std::size_t slots;
    double m0, m1, m2;
  };
  const Point points[] = {
      {false, 4, 0.1, 0, 0},        {false, 8, 0.5, 0.01, 0.001}, {false, 16, 1.0, 0.05, 0.01},
      {false, 2, 0.3, 0, 0.02},     {false, 64, 3.0, 0.02, 0},    {false, 1, 0.2, 0, 0},
      {true, 4, 0.05, 0.05, 0},     {true, 8, 0.3, 0.2, 0.01},    {true, 16, 1.0, 0.5, 0.005},
      {true, 2, 0.1, 0.3, 0},       {true, 64, 2.0, 1.0, 0.01},   {true, 1, 0.1, 0.1, 0},
  };
  bool pass = true;
  double worst = 0;
  std::uint64_t seed = 100;
  for (const Point& p : points) {
    const auto mc =
        testing::monte_carlo_coverage(p.full, p.slots, p.m0, p.m1, p.m2, 1000000, seed++);
    const double fc = p.full ? coverage::fc_full_means(p.slots, p.m0, p.m1, p.m2)
                             : coverage::fc_single_means(p.slots, p.m0, p.m1, p.m2);
    const double z = std::abs(fc - mc.p) / mc.sigma;
    worst = std::max(worst, z);
    pass = pass && z <= 3;
  }
  return {pass, std::to_string(std::size(points)) + " points, worst deviation " + g(worst) +
                    " sigma (limit 3)"};
}

Outcome adaptive_abft_contract() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) {
    return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * u(rng));
  };
  const ProcessorModel gpu = ProcessorModel::default_gpu();
  std::size_t bad_coverage = 0, raised = 0, infeasible = 0, single_count = 0, full_count = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double f_safe = 1300 + 100 * std::floor(8 * u(rng));
    const coverage::ErrorRateTable table =
        trial % 10 == 0 ? coverage::ErrorRateTable::zero()
                        : coverage::ErrorRateTable::ramp(f_safe, 2200, log_uniform(1e-6, 10),
                                                         log_uniform(1e-9, 1), log_uniform(1e-12, 0.1));
    coverage::CoverageParams params{1 + static_cast<std::size_t>(128 * u(rng))};
    const Mhz f_desired = gpu.f_base + 100 * static_cast<Mhz>(std::floor(10 * u(rng)));
    const double t_base = 0.01 + 5 * u(rng);
    const coverage::AbftDecision d =
        coverage::adaptive_abft(params, table, f_desired, gpu.f_base, t_base, gpu.f_min);
    raised += d.f > f_desired;
    infeasible += !d.feasible;
    const double seconds = t_base * gpu.f_base / d.f;
    if (d.scheme() == ChecksumScheme::None) {
      bad_coverage += !table.fault_free(d.f);
    } else {
      ++(d.scheme() == ChecksumScheme::Full ? full_count : single_count);
      bad_coverage +=
          coverage::fault_coverage(d.scheme(), table, params, d.f, seconds) < coverage::kFullCoverage;
    }
  }
  return {bad_coverage == 0 && raised == 0 && infeasible == 0,
          "1000 inputs, " + std::to_string(single_count) + " single-side, " +
              std::to_string(full_count) + " full; coverage violations " +
              std::to_string(bad_coverage) + ", frequency raised " + std::to_string(raised) +
              ", infeasible " + std::to_string(infeasible)};
}

Outcome abft_correction() {
  std::size_t d0_ok = 0, d1_full_ok = 0, d1_single_flagged = 0;
  double worst_d0 = 0, worst_d1 = 0;
  const std::size_t runs = 1000;
  for (std::size_t i = 0; i < runs; ++i) {
    const DecompositionKind kind = kKinds[i % 3];
    const auto single0 =
        testing::protected_run(kind, 256, 32, ChecksumScheme::SingleSide, true, ErrorKind::D0, i);
    worst_d0 = std::max(worst_d0, single0.residual);
    d0_ok += single0.injected && single0.residual <= 1e-8;

    const auto full1 =
        testing::protected_run(kind, 256, 32, ChecksumScheme::Full, true, ErrorKind::D1, i);
    worst_d1 = std::max(worst_d1, full1.residual);
    d1_full_ok += full1.injected && full1.report.corrected[index(ErrorKind::D1)] == 1 &&
                  !full1.report.uncorrectable && full1.residual <= 1e-8;

    const auto single1 =
        testing::protected_run(kind, 256, 32, ChecksumScheme::SingleSide, true, ErrorKind::D1, i);
    d1_single_flagged += single1.injected && single1.report.uncorrectable;
  }
  return {d0_ok == runs && d1_full_ok == runs && d1_single_flagged == runs,
          "0D single-side ok " + std::to_string(d0_ok) + "/1000 (worst residual " + g(worst_d0) +
              "); 1D full corrected " + std::to_string(d1_full_ok) + "/1000 (worst residual " +
              g(worst_d1) + "); 1D single-side flagged " + std::to_string(d1_single_flagged) +
              "/1000"};
}

// 95% Wilson interval.
std::pair<double, double> wilson(std::size_t ok, std::size_t n) {
  const double z = 1.959963984540054, p = static_cast<double>(ok) / n, nn = static_cast<double>(n);
  const double centre = (p + z * z / (2 * nn)) / (1 + z * z / nn);
  const double half = z * std::sqrt(p * (1 - p) / nn + z * z / (4 * nn * nn)) / (1 + z * z / nn);
  return {centre - half, centre + half};
}

Outcome fault_campaign() {
  sim::SimConfig c;
  c.n = 30720;
  c.b = 512;
  c.mode = Mode::BSR;
  c.r = 0.5;
  const auto rows = sim::fault_campaign(c, 2000);
  const auto& none = rows[0];
  const auto& single = rows[1];
  const auto& full = rows[2];
  const auto& adaptive = rows[3];
  const auto ci_none = wilson(none.correct, none.trials);
  const auto ci_single = wilson(single.correct, single.trials);
  const auto ci_full = wilson(full.correct, full.trials);
  const auto ci_adaptive = wilson(adaptive.correct, adaptive.trials);
  const bool order = ci_none.second < ci_single.first && ci_single.second < ci_full.first;
  const bool complete = ci_full.second >= 1.0 - 1e-12 && ci_adaptive.second >= 1.0 - 1e-12;
  const bool cheaper = adaptive.overhead_fraction < full.overhead_fraction;
  std::string detail;
  for (const auto& r : rows)
    detail += std::string(detail.empty() ? "" : "; ") + std::string(to_string(r.scheme)) + " " +
              fmt("%.4f", r.correct_fraction) + " correct, overhead " +
              fmt("%.4f", r.overhead_fraction);
  return {order && complete && cheaper, detail};
}

// Active energy of one side of an accounted iteration.
double active(const sim::IterationAccount& a) {
  return a.energy.cpu.dynamic + a.energy.cpu.stat + a.energy.gpu.dynamic + a.energy.gpu.stat;
}

Outcome delta_e_ledger(FloorLog* floors) {
  const ProcessorModel cpu = ProcessorModel::default_cpu();
  const ProcessorModel gpu = ProcessorModel::default_gpu();
  struct Case {
    power::SlackSide side;
    double slack;
  };
  const Case cases[] = {{power::SlackSide::Cpu, 0.1},  {power::SlackSide::Cpu, 0.3},
                        {power::SlackSide::Cpu, 0.6},  {power::SlackSide::Gpu, 0.05},
                        {power::SlackSide::Gpu, 0.1},  {power::SlackSide::Gpu, 0.2}};
  double worst = 0;
  std::size_t count = 0;
  for (const Case& cs : cases)
    for (int i = 0; i <= 20; ++i) {
      const double r = 0.05 * i, s = cs.slack;
      const bool cpu_slack = cs.side == power::SlackSide::Cpu;
      const double t_cpu = cpu_slack ? 1.0 : 1.0 + s;
      const double t_gpu = cpu_slack ? 1.0 + s : 1.0;
      sim::IterationPlan old_plan;
      old_plan.cpu_tasks_s = {t_cpu};
      old_plan.gpu_tasks_s = {t_gpu};
      old_plan.f_cpu = old_plan.idle_f_cpu = cpu.f_base;
      old_plan.f_gpu = old_plan.idle_f_gpu = gpu.f_base;

      // The slack holder stretches by s (1 - r), the critical side shrinks by
      // s r; both sides now run with the optimized guardband.
      sim::IterationPlan new_plan = old_plan;
      new_plan.gb_cpu = new_plan.gb_gpu = power::Guardband::Optimized;
      const double t_slow = (cpu_slack ? t_cpu : t_gpu) + s * (1 - r);
      const double t_fast = (cpu_slack ? t_gpu : t_cpu) - s * r;
      const double t_cpu_new = cpu_slack ? t_slow : t_fast;
      const double t_gpu_new = cpu_slack ? t_fast : t_slow;
      new_plan.cpu_tasks_s = {t_cpu_new};
      new_plan.gpu_tasks_s = {t_gpu_new};
      new_plan.f_cpu = cpu.f_base * t_cpu / t_cpu_new;
      new_plan.f_gpu = gpu.f_base * t_gpu / t_gpu_new;
      const sim::IterationAccount before = sim::account_iteration(cpu, gpu, old_plan);
      const sim::IterationAccount after = sim::account_iteration(cpu, gpu, new_plan);
      const double ledger = active(before) - active(after);
      const double analytic = power::delta_e(cpu, gpu, t_cpu, t_gpu, s, r, cs.side).total();
      const double rel = ledger == 0 ? std::abs(analytic) : std::abs(analytic - ledger) / std::abs(ledger);
      worst = std::max(worst, rel);
      ++count;

      const double w_cpu = t_cpu * cpu.task_rate[index(TaskKind::PD)];
      const double w_gpu = t_gpu * gpu.task_rate[index(TaskKind::TMU)];
      log_floor(floors, "ledger", before.energy.total(), w_cpu, w_gpu, cpu, gpu);
      log_floor(floors, "ledger", after.energy.total(), w_cpu, w_gpu, cpu, gpu);
    }
  return {worst <= 1e-9, std::to_string(count) + " (r, slack) points, worst relative difference " +
                             g(worst) + " (limit 1e-9)"};
}

struct DeskCase {
  double p_cpu, d_cpu, a_cpu, p_gpu, d_gpu, a_gpu, t_cpu, t_gpu;
};

constexpr DeskCase kDeskCases[] = {
    {95, 0.7, 0.92, 250, 0.75, 0.9, 1.0, 1.3},  {100, 0.6, 0.9, 100, 0.6, 0.97, 1.0, 1.3},
    {120, 0.65, 0.88, 300, 0.8, 0.85, 0.8, 1.2}, {80, 0.5, 0.95, 200, 0.7, 0.99, 1.0, 1.5},
    {100, 0.8, 0.98, 150, 0.6, 0.9, 1.2, 0.9},
};

sim::DeskConfig desk_of(const DeskCase& c) {
  sim::DeskConfig d;
  d.cpu.p_total = c.p_cpu;
  d.cpu.d = c.d_cpu;
  d.cpu.alpha_curve = {{static_cast<double>(d.cpu.f_base), c.a_cpu}};
  d.cpu.step = 1;
  d.gpu.p_total = c.p_gpu;
  d.gpu.d = c.d_gpu;
  d.gpu.alpha_curve = {{static_cast<double>(d.gpu.f_base), c.a_gpu}};
  d.gpu.step = 1;
  d.t_cpu = c.t_cpu;
  d.t_gpu = c.t_gpu;
  return d;
}

void log_desk(FloorLog* floors, const std::string& label, const sim::DeskConfig& d,
              const sim::DeskResult& res) {
  const double iters = static_cast<double>(d.iterations);
  log_floor(floors, label, res.energy.total(),
            iters * d.t_cpu * d.cpu.task_rate[index(TaskKind::PD)],
            iters * d.t_gpu * d.gpu.task_rate[index(TaskKind::TMU)], d.cpu, d.gpu);
}

Outcome break_even(FloorLog* floors) {
  bool pass = true;
  std::string detail;
  for (const DeskCase& c : kDeskCases) {
    const sim::DeskConfig d = desk_of(c);
    const auto side = c.t_gpu > c.t_cpu ? power::SlackSide::Cpu : power::SlackSide::Gpu;
    const power::BreakEven be =
        power::solve_break_even_r(d.cpu, d.gpu, c.t_cpu, c.t_gpu, std::abs(c.t_gpu - c.t_cpu), side);
    const sim::DeskResult original = sim::simulate_desk(d, Mode::Original, 0);
    log_desk(floors, "desk original", d, original);
    // First r where the simulated BSR saving turns into a loss.
    double prev = 0, prev_r = 0, crossing = -1;
    for (int i = 0; i <= 100; ++i) {
      const double r = 0.01 * i;
      const sim::DeskResult bsr = sim::simulate_desk(d, Mode::BSR, r);
      log_desk(floors, "desk bsr", d, bsr);
      const double extra = bsr.active_j() - original.active_j();
      if (i > 0 && crossing < 0 && prev <= 0 && extra > 0)
        crossing = prev_r + 0.01 * (-prev) / (extra - prev);
      prev = extra;
      prev_r = r;
    }
    if (crossing < 0 && be.status == power::BreakEvenStatus::AllPositive) crossing = 1.0;
    const bool ok = crossing >= 0 && std::abs(be.r - crossing) <= 0.05;
    pass = pass && ok;
    detail += std::string(detail.empty() ? "" : "; ") + "root " + fmt("%.3f", be.r) +
              " vs crossing " + (crossing < 0 ? std::string("none") : fmt("%.3f", crossing));
  }
  return {pass, detail};
}

Outcome mode_ordering(FloorLog* floors) {
  const sim::DeskConfig d;
  const sim::DeskResult original = sim::simulate_desk(d, Mode::Original, 0);
  const sim::DeskResult r2h = sim::simulate_desk(d, Mode::R2H, 0);
  const sim::DeskResult sr = sim::simulate_desk(d, Mode::SR, 0);
  const sim::DeskResult bsr0 = sim::simulate_desk(d, Mode::BSR, 0);
  for (const auto* res : {&original, &r2h, &sr, &bsr0}) log_desk(floors, "desk default", d, *res);
  const double e_o = original.energy.total(), e_r = r2h.energy.total(), e_s = sr.energy.total(),
               e_b = bsr0.energy.total();
  const bool energy_order = e_o >= e_r && e_r >= e_s && e_s >= e_b;
  const bool ed2p_ok = power::ed2p(e_b, bsr0.time_s) <= power::ed2p(e_s, sr.time_s);
  bool time_ok = true;
  double worst_time = 0;
  for (int i = 0; i <= 20; ++i) {
    const sim::DeskResult b = sim::simulate_desk(d, Mode::BSR, 0.05 * i);
    log_desk(floors, "desk default bsr", d, b);
    worst_time = std::max(worst_time, b.time_s / original.time_s - 1);
    time_ok = time_ok && b.time_s <= original.time_s * 1.001;
  }
  return {energy_order && ed2p_ok && time_ok,
          "energy original " + g(e_o) + " >= r2h " + g(e_r) + " >= sr " + g(e_s) + " >= bsr(0) " +
              g(e_b) + " J; ed2p bsr(0) " + g(power::ed2p(e_b, bsr0.time_s)) + " vs sr " +
              g(power::ed2p(e_s, sr.time_s)) + "; worst bsr time excess " +
              fmt("%.3g%%", 100 * worst_time)};
}

Outcome predictor_ordering() {
  bool pass = true;
  std::string detail;
  for (DecompositionKind kind : kKinds) {
    sim::SimConfig c;
    c.kind = kind;
    c.mode = Mode::BSR;
    c.r = 0.25;
    c.drift = {0.1, 0.1};
    c.predictor = predictor::PredictorKind::Enhanced;
    const double enhanced = sim::simulate_run(c).summary.mean_prediction_error;
    c.predictor = predictor::PredictorKind::Baseline;
    const double baseline = sim::simulate_run(c).summary.mean_prediction_error;

    c.drift = {};
    c.noise_sigma = 0;
    c.predictor = predictor::PredictorKind::Enhanced;
    std::vector<sim::IterationRecord> steady;
    for (const sim::IterationRecord& rec : sim::simulate_run(c).trace)
      if (rec.k >= predictor::PredictorWeights{}.p()) steady.push_back(rec);
    const predictor::ErrorStats clean = sim::prediction_error_stats(steady);
    const double clean_max =
        clean.errors.empty() ? INFINITY : *std::max_element(clean.errors.begin(), clean.errors.end());
    pass = pass && enhanced < baseline && clean_max <= 1e-10;
    detail += std::string(detail.empty() ? "" : "; ") + kind_name(kind) + " enhanced " +
              fmt("%.4f", enhanced) + " vs baseline " + fmt("%.4f", baseline) + ", clean max " +
              g(clean_max);
  }
  return {pass, detail};
}

Outcome energy_floor() {
  FloorLog floors;
  delta_e_ledger(&floors);
  break_even(&floors);
  mode_ordering(&floors);
  std::size_t below = 0;
  double min_gap = INFINITY, max_gap = 0;
  for (const FloorEntry& e : floors) {
    below += e.energy < e.floor;
    const double gap = (e.energy - e.floor) / e.floor;
    min_gap = std::min(min_gap, gap);
    max_gap = std::max(max_gap, gap);
  }
  return {below == 0 && !floors.empty(),
          std::to_string(floors.size()) + " runs, " + std::to_string(below) +
              " below floor; gap from " + fmt("%.1f%%", 100 * min_gap) + " to " +
              fmt("%.1f%%", 100 * max_gap)};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "slackwise-acceptance-determinism";
  fs::remove_all(root);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  };
  const nlohmann::json docs[] = {
      {{"alg", "lu"}, {"n", 1024}, {"b", 128}, {"mode", "bsr"}, {"r", 0.25}, {"seed", 1}},
      {{"alg", "qr"}, {"n", 4096}, {"b", 256}, {"mode", "bsr"}, {"r", 0.5}, {"seed", 7},
       {"engine", "numeric"}, {"noise_sigma", 0.05}, {"drift", {{"cpu", 0.1}, {"gpu", 0.1}}}},
  };
  bool pass = true;
  std::size_t compared = 0;
  std::ostringstream log;
  for (std::size_t i = 0; i < std::size(docs); ++i) {
    std::string first[2];
    for (int rep = 0; rep < 2; ++rep) {
      cli::CliConfig c = cli::parse_config(docs[i]);
      c.out_dir = (root / (std::to_string(i) + "-" + std::to_string(rep))).string();
      pass = pass && cli::cmd_run(c, log) == 0;
      const std::string files[2] = {slurp(fs::path(c.out_dir) / "trace.csv"),
                                    slurp(fs::path(c.out_dir) / "summary.json")};
      for (int f = 0; f < 2; ++f) {
        pass = pass && !files[f].empty();
        if (rep == 0) first[f] = files[f];
        else {
          pass = pass && files[f] == first[f];
          ++compared;
        }
      }
    }
  }
  fs::remove_all(root);
  return {pass, std::to_string(compared) + " file pairs compared byte for byte"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  int only = 0;
  app.add_option("--criterion", only, "Run a single criterion (1-12)")->check(CLI::Range(1, 12));
  CLI11_PARSE(app, argc, argv);

  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double limit_s;
  };
  const Criterion criteria[] = {
      {"factorization_correctness", factorization_correctness, 10},
      {"ratio_table", ratio_table, 1},
      {"coverage_oracle", coverage_oracle, 60},
      {"adaptive_abft_contract", adaptive_abft_contract, 5},
      {"abft_correction", abft_correction, 300},
      {"fault_campaign", fault_campaign, 900},
      {"delta_e_ledger", [] { return delta_e_ledger(nullptr); }, 5},
      {"break_even", [] { return break_even(nullptr); }, 30},
      {"mode_ordering", [] { return mode_ordering(nullptr); }, 60},
      {"predictor_ordering", predictor_ordering, 10},
      {"energy_floor", energy_floor, 600},
      {"determinism", determinism, 600},
  };
  int failures = 0;
  for (int i = 1; i <= 12; ++i) {
    if (only != 0 && only != i) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i - 1].run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= criteria[i - 1].limit_s) {
      o.pass = false;
      o.detail += ", over the " + fmt("%.0f", criteria[i - 1].limit_s) + " s limit";
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << i << " " << criteria[i - 1].name << ": "
              << o.detail << " [" << fmt("%.2f", secs) << " s]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
