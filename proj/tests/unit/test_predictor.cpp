#include <cmath>

#include "doctest.h"
#include "slackwise/flops.hpp"
#include "slackwise/matrix.hpp"
#include "slackwise/predictor.hpp"

using namespace slackwise;
using namespace slackwise::predictor;

namespace {

constexpr double kRate = 2e11;

// Time of a task in a world with constant efficiency, or with efficiency
// ramping linearly by `drift` over the run.
double world_time(DecompositionKind kind, TaskKind task, std::size_t n, std::size_t b,
                  std::size_t k, double drift) {
  const double iters = static_cast<double>(linalg::BlockLayout(n, b).n_blocks() - 1);
  const double eff = 1 - drift + 2 * drift * static_cast<double>(k) / iters;
  return linalg::task_flops(kind, task, n, b, k) / (kRate * eff);
}

double mean_error(PredictorKind mode, double drift) {
  const std::size_t n = 4096, b = 128;
  SlackPredictor p(DecompositionKind::LU, n, b, mode);
  double sum = 0;
  std::size_t count = 0;
  for (std::size_t k = 0; k + 1 < n / b; ++k) {
    const double actual = world_time(DecompositionKind::LU, TaskKind::TMU, n, b, k, drift);
    if (const auto pred = p.predict(TaskKind::TMU, Component::Compute, ChecksumScheme::None, k)) {
      sum += std::abs(*pred - actual) / actual;
      ++count;
    }
    p.record(TaskKind::TMU, Component::Compute, ChecksumScheme::None, k, actual);
  }
  return sum / static_cast<double>(count);
}

}  // namespace

TEST_SUITE("predictor") {
  TEST_CASE("default weights") {
    const PredictorWeights w;
    CHECK(w.p() == 4);
    w.validate();
    CHECK(w.w == std::vector<double>{0.5, 0.25, 0.125, 0.125});
    CHECK_THROWS_AS((PredictorWeights{{0.5, 0.25}}.validate()), InvalidArgument);
    CHECK_THROWS_AS((PredictorWeights{{}}.validate()), InvalidArgument);
  }

  TEST_CASE("complexity ratios") {
    const std::size_t n = 4096, b = 64;
    CHECK(complexity_ratio(DecompositionKind::LU, TaskKind::TMU, Component::Compute, 5, 5, n, b) ==
          1.0);
    for (std::size_t k = 0; k + 1 < 20; ++k)
      CHECK(complexity_ratio(DecompositionKind::Cholesky, TaskKind::PD, Component::Compute, k,
                             k + 1, n, b) == 1.0);
    // Panel bytes shrink by one block column of rows per iteration.
    const double transfer =
        complexity_ratio(DecompositionKind::LU, TaskKind::Transfer, Component::Compute, 3, 4, n, b);
    CHECK(transfer == doctest::Approx(1.0 - 64.0 / (4096.0 - 3 * 64.0)).epsilon(1e-14));
    CHECK_THROWS_AS(
        complexity_ratio(DecompositionKind::QR, TaskKind::PU, Component::Compute, 1, 2, n, b),
        InvalidArgument);
  }

  TEST_CASE("weighted neighbour prediction") {
    auto unit = [](const HistoryEntry&, std::size_t) { return 1.0; };
    std::deque<HistoryEntry> constant{{0, 3.0}, {1, 3.0}, {2, 3.0}, {3, 3.0}, {4, 3.0}};
    CHECK(predict_op_time(constant, PredictorWeights{}, 5, unit) == doctest::Approx(3.0));

    std::deque<HistoryEntry> one{{0, 2.0}};
    auto shrink = [](const HistoryEntry&, std::size_t) { return 0.9; };
    CHECK(predict_op_time(one, PredictorWeights{}, 1, shrink) == doctest::Approx(1.8));

    // Two entries renormalize the leading weights 1/2 and 1/4 to 2/3 and 1/3.
    std::deque<HistoryEntry> two{{0, 1.0}, {1, 4.0}};
    CHECK(predict_op_time(two, PredictorWeights{}, 2, unit) ==
          doctest::Approx(2.0 / 3.0 * 4.0 + 1.0 / 3.0 * 1.0));

    // Newest entry carries the largest weight.
    std::deque<HistoryEntry> four{{0, 1.0}, {1, 2.0}, {2, 3.0}, {3, 4.0}};
    CHECK(predict_op_time(four, PredictorWeights{}, 4, unit) ==
          doctest::Approx(0.5 * 4 + 0.25 * 3 + 0.125 * 2 + 0.125 * 1));

    CHECK_THROWS_AS(predict_op_time(std::deque<HistoryEntry>{}, PredictorWeights{}, 1, unit),
                    InvalidArgument);
  }

  TEST_CASE("history keeps the last p entries in order") {
    OpHistory h(4);
    for (std::size_t k = 0; k < 7; ++k) h.record(TaskKind::PD, Component::Compute, {k, 1.0});
    const auto& e = h.entries(TaskKind::PD, Component::Compute);
    CHECK(e.size() == 4);
    CHECK(e.front().k == 3);
    CHECK(e.back().k == 6);
    CHECK_THROWS_AS(h.record(TaskKind::PD, Component::Compute, {6, 1.0}), InvalidArgument);
  }

  TEST_CASE("exact in a constant-efficiency world") {
    const std::size_t n = 4096, b = 128;
    for (PredictorKind mode : {PredictorKind::Enhanced, PredictorKind::Baseline}) {
      SlackPredictor p(DecompositionKind::LU, n, b, mode);
      CHECK_FALSE(p.predict(TaskKind::PD, Component::Compute, ChecksumScheme::None, 0).has_value());
      for (std::size_t k = 0; k + 1 < n / b; ++k) {
        for (TaskKind t : {TaskKind::PD, TaskKind::PU, TaskKind::TMU}) {
          const double actual = world_time(DecompositionKind::LU, t, n, b, k, 0.0);
          if (k > 0) {
            const auto pred = p.predict(t, Component::Compute, ChecksumScheme::None, k);
            REQUIRE(pred.has_value());
            CHECK(std::abs(*pred - actual) <= 1e-12 * actual);
          }
          p.record(t, Component::Compute, ChecksumScheme::None, k, actual);
        }
      }
    }
  }

  TEST_CASE("baseline at the profiled iteration returns the profile") {
    const HistoryEntry first{0, 2.5};
    CHECK(baseline_first_iter_predict(first, 0, 1.0) == 2.5);
    CHECK(baseline_first_iter_predict(first, 3, 0.5) == 1.25);
  }

  TEST_CASE("neighbour prediction beats first-iteration scaling under drift") {
    const double enhanced = mean_error(PredictorKind::Enhanced, 0.1);
    const double baseline = mean_error(PredictorKind::Baseline, 0.1);
    CHECK(enhanced < baseline);
    CHECK(mean_error(PredictorKind::Enhanced, 0.0) <= 1e-12);
    CHECK(mean_error(PredictorKind::Baseline, 0.0) <= 1e-12);
  }

  TEST_CASE("slack prediction") {
    IterationPrediction p;
    p.at(TaskKind::PD, Component::Compute) = 1.0;
    p.at(TaskKind::PU, Component::Compute) = 0.4;
    p.at(TaskKind::TMU, Component::Compute) = 0.6;
    CHECK(predict_slack(p, false) == 0.0);
    p.at(TaskKind::TMU, Component::Compute) = 1.6;
    p.at(TaskKind::Transfer, Component::Compute) = 0.25;
    CHECK(predict_slack(p, false) == doctest::Approx(1.6 + 0.4 - 1.0 - 0.25));
    p.at(TaskKind::TMU, Component::ChecksumVerify) = 0.1;
    p.at(TaskKind::PD, Component::ChecksumVerify) = 0.02;
    p.at(TaskKind::Transfer, Component::ChecksumUpdate) = 0.01;
    CHECK(predict_slack(p, false) == doctest::Approx(0.75));
    CHECK(predict_slack(p, true) == doctest::Approx(0.75 + 0.1 - 0.02 - 0.01));
  }

  TEST_CASE("relative errors") {
    const ErrorStats perfect = relative_errors({1, 2, 3}, {1, 2, 3});
    CHECK(perfect.mean == 0.0);
    const ErrorStats one = relative_errors({1.1}, {1.0});
    CHECK(one.mean == doctest::Approx(0.1));
    const ErrorStats skip = relative_errors({1.0, 5.0}, {0.0, 4.0});
    CHECK(skip.excluded == 1);
    CHECK(skip.errors.size() == 1);
    CHECK(skip.mean == doctest::Approx(0.25));
    CHECK_THROWS_AS(relative_errors({1.0}, {}), InvalidArgument);
  }
}
