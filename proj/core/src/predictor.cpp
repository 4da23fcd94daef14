#include "slackwise/predictor.hpp"

#include <cmath>
#include <numeric>

#include "slackwise/flops.hpp"

namespace slackwise::predictor {

void PredictorWeights::validate() const {
  if (w.empty()) throw InvalidArgument("predictor weights must not be empty");
  double sum = 0;
  for (double x : w) {
    if (!(x > 0)) throw InvalidArgument("predictor weights must be positive");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw InvalidArgument("predictor weights must sum to 1");
}

double complexity(DecompositionKind kind, TaskKind task, Component c, ChecksumScheme scheme,
                  std::size_t n, std::size_t b, std::size_t k) {
  if (task == TaskKind::Transfer) {
    if (c == Component::Compute) return linalg::transfer_bytes(kind, n, b, k);
    if (c == Component::ChecksumUpdate) return linalg::checksum_transfer_bytes(scheme, kind, n, b, k);
    return 0;
  }
  switch (c) {
    case Component::Compute: return linalg::task_flops(kind, task, n, b, k);
    case Component::ChecksumUpdate:
      return linalg::checksum_flops(scheme, kind, task, linalg::ChecksumComponent::Update, n, b, k);
    case Component::ChecksumVerify:
      return linalg::checksum_flops(scheme, kind, task, linalg::ChecksumComponent::Verify, n, b, k);
  }
  return 0;
}

double complexity_ratio(DecompositionKind kind, TaskKind task, Component c, ChecksumScheme sj,
                        ChecksumScheme sk, std::size_t j, std::size_t k, std::size_t n,
                        std::size_t b) {
  const double cj = complexity(kind, task, c, sj, n, b, j);
  if (cj == 0) throw InvalidArgument("complexity_ratio: zero complexity at the reference iteration");
  return complexity(kind, task, c, sk, n, b, k) / cj;
}

double complexity_ratio(DecompositionKind kind, TaskKind task, Component c, std::size_t j,
                        std::size_t k, std::size_t n, std::size_t b) {
  const ChecksumScheme s = c == Component::Compute && task != TaskKind::Transfer
                               ? ChecksumScheme::None
                               : ChecksumScheme::SingleSide;
  return complexity_ratio(kind, task, c, s, s, j, k, n, b);
}

void OpHistory::record(TaskKind task, Component c, const HistoryEntry& e) {
  auto& ring = rings_[slackwise::index(task)][index(c)];
  if (!ring.empty() && e.k <= ring.back().k)
    throw InvalidArgument("history iterations must increase");
  ring.push_back(e);
  while (ring.size() > p_) ring.pop_front();
}

double baseline_first_iter_predict(const HistoryEntry& first, std::size_t, double ratio) {
  return ratio * first.seconds;
}

double IterationPrediction::cpu_checksum() const {
  return get(TaskKind::PD, Component::ChecksumUpdate) + get(TaskKind::PD, Component::ChecksumVerify);
}

double IterationPrediction::gpu_checksum() const {
  double t = 0;
  for (TaskKind task : {TaskKind::PU, TaskKind::TMU})
    t += get(task, Component::ChecksumUpdate) + get(task, Component::ChecksumVerify);
  return t;
}

double predict_slack(const IterationPrediction& p, bool with_checksums) {
  double s = p.gpu_compute() - p.cpu_compute() - p.transfer();
  if (with_checksums) s += p.gpu_checksum() - p.cpu_checksum() - p.transfer_checksum();
  return s;
}

SlackPredictor::SlackPredictor(DecompositionKind kind, std::size_t n, std::size_t b,
                               PredictorKind mode, PredictorWeights weights)
    : kind_(kind), n_(n), b_(b), mode_(mode), weights_(std::move(weights)),
      history_(weights_.p()) {
  weights_.validate();
}

std::optional<double> SlackPredictor::predict(TaskKind task, Component c, ChecksumScheme scheme,
                                              std::size_t k) const {
  const double ck = complexity(kind_, task, c, scheme, n_, b_, k);
  if (ck == 0) return 0.0;
  auto ratio = [&](const HistoryEntry& e, std::size_t kk) {
    return complexity_ratio(kind_, task, c, e.scheme, scheme, e.k, kk, n_, b_);
  };
  if (mode_ == PredictorKind::Baseline) {
    const auto& first = first_[slackwise::index(task)][index(c)];
    if (!first) return std::nullopt;
    return baseline_first_iter_predict(*first, k, ratio(*first, k));
  }
  const auto& ring = history_.entries(task, c);
  if (ring.empty()) return std::nullopt;
  return predict_op_time(ring, weights_, k, ratio);
}

void SlackPredictor::record(TaskKind task, Component c, ChecksumScheme scheme, std::size_t k,
                            double seconds) {
  if (complexity(kind_, task, c, scheme, n_, b_, k) == 0) return;
  const HistoryEntry e{k, seconds, scheme};
  history_.record(task, c, e);
  auto& first = first_[slackwise::index(task)][index(c)];
  if (!first) first = e;
}

ErrorStats relative_errors(const std::vector<double>& predicted, const std::vector<double>& actual) {
  if (predicted.size() != actual.size())
    throw InvalidArgument("relative_errors: series lengths differ");
  ErrorStats s;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] == 0) {
      ++s.excluded;
      continue;
    }
    s.errors.push_back(std::abs(predicted[i] - actual[i]) / std::abs(actual[i]));
  }
  if (!s.errors.empty())
    s.mean = std::accumulate(s.errors.begin(), s.errors.end(), 0.0) /
             static_cast<double>(s.errors.size());
  return s;
}

}  // namespace slackwise::predictor
