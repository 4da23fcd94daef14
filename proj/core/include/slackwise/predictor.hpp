#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <deque>
#include <optional>
#include <vector>

#include "slackwise/types.hpp"

namespace slackwise::predictor {

/// Part of a task whose time is profiled separately. For Transfer, Compute is
/// the panel data and ChecksumUpdate the checksum payload.
enum class Component { Compute, ChecksumUpdate, ChecksumVerify };

inline constexpr std::array<Component, 3> kComponents = {
    Component::Compute, Component::ChecksumUpdate, Component::ChecksumVerify};
constexpr std::size_t index(Component c) { return static_cast<std::size_t>(c); }

struct PredictorWeights {
  std::vector<double> w{0.5, 0.25, 0.125, 0.125};
  std::size_t p() const { return w.size(); }
  void validate() const;
};

/// Work of one task component at iteration k: flops, or bytes for Transfer.
double complexity(DecompositionKind kind, TaskKind task, Component component,
                  ChecksumScheme scheme, std::size_t n, std::size_t b, std::size_t k);

/// C(k) / C(j). Throws when C(j) is zero.
double complexity_ratio(DecompositionKind kind, TaskKind task, Component component,
                        ChecksumScheme scheme_j, ChecksumScheme scheme_k, std::size_t j,
                        std::size_t k, std::size_t n, std::size_t b);
double complexity_ratio(DecompositionKind kind, TaskKind task, Component component,
                        std::size_t j, std::size_t k, std::size_t n, std::size_t b);

struct HistoryEntry {
  std::size_t k = 0;
  double seconds = 0;  // base-frequency equivalent
  ChecksumScheme scheme = ChecksumScheme::None;
};

/// Last p profiled (iteration, time) pairs per task and component, newest last.
class OpHistory {
 public:
  explicit OpHistory(std::size_t p = 4) : p_(p) {}

  void record(TaskKind task, Component c, const HistoryEntry& e);
  const std::deque<HistoryEntry>& entries(TaskKind task, Component c) const {
    return rings_[slackwise::index(task)][index(c)];
  }
  std::size_t capacity() const { return p_; }

 private:
  std::size_t p_;
  std::array<std::array<std::deque<HistoryEntry>, 3>, 4> rings_;
};

/// Weighted ratio-scaled sum over the history, newest entry first. Weights are
/// renormalized when fewer than p entries exist.
template <typename RatioFn>
double predict_op_time(const std::deque<HistoryEntry>& history, const PredictorWeights& weights,
                       std::size_t k, RatioFn ratio) {
  if (history.empty()) throw InvalidArgument("predict_op_time: empty history");
  const std::size_t used = std::min(history.size(), weights.p());
  double wsum = 0;
  for (std::size_t i = 0; i < used; ++i) wsum += weights.w[i];
  double t = 0;
  for (std::size_t i = 0; i < used; ++i) {
    const HistoryEntry& e = history[history.size() - 1 - i];
    t += weights.w[i] / wsum * ratio(e, k) * e.seconds;
  }
  return t;
}

/// r_{j,k} T_j from a single profiled iteration.
double baseline_first_iter_predict(const HistoryEntry& first, std::size_t k, double ratio);

/// Per-task, per-component predicted base-frequency times for one iteration.
struct IterationPrediction {
  std::array<std::array<double, 3>, 4> t{};
  std::array<std::array<bool, 3>, 4> known{};

  double get(TaskKind task, Component c) const { return t[slackwise::index(task)][index(c)]; }
  double& at(TaskKind task, Component c) { return t[slackwise::index(task)][index(c)]; }

  double cpu_compute() const { return get(TaskKind::PD, Component::Compute); }
  double gpu_compute() const {
    return get(TaskKind::PU, Component::Compute) + get(TaskKind::TMU, Component::Compute);
  }
  double transfer() const { return get(TaskKind::Transfer, Component::Compute); }
  double cpu_checksum() const;
  double gpu_checksum() const;
  double transfer_checksum() const { return get(TaskKind::Transfer, Component::ChecksumUpdate); }
};

/// GPU-side total minus CPU-side and transfer totals. Positive means the CPU
/// waits. Checksum terms are included only when `with_checksums`.
double predict_slack(const IterationPrediction& p, bool with_checksums);

enum class PredictorKind { Enhanced, Baseline };

/// Predicts component times from profiled history. Enhanced uses the last p
/// iterations; Baseline scales the first profiled iteration only.
class SlackPredictor {
 public:
  SlackPredictor(DecompositionKind kind, std::size_t n, std::size_t b, PredictorKind mode,
                 PredictorWeights weights = {});

  /// nullopt when nothing has been profiled for this task and component.
  std::optional<double> predict(TaskKind task, Component c, ChecksumScheme scheme,
                                std::size_t k) const;
  /// Records a base-frequency-equivalent time. Zero-work entries are skipped.
  void record(TaskKind task, Component c, ChecksumScheme scheme, std::size_t k, double seconds);

  PredictorKind mode() const { return mode_; }

 private:
  DecompositionKind kind_;
  std::size_t n_, b_;
  PredictorKind mode_;
  PredictorWeights weights_;
  OpHistory history_;
  std::array<std::array<std::optional<HistoryEntry>, 3>, 4> first_{};
};

struct ErrorStats {
  std::vector<double> errors;
  double mean = 0;
  std::size_t excluded = 0;
};

/// |pred - actual| / |actual| per pair; pairs with zero actual are excluded
/// and counted.
ErrorStats relative_errors(const std::vector<double>& predicted, const std::vector<double>& actual);

}  // namespace slackwise::predictor
