#include "bobw/base_learners.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bobw {

namespace {
double shift_loss(double loss, LossRange range) { return range == LossRange::MinusOneOne ? 0.5 * (loss + 1.0) : loss; }
}  // namespace

std::vector<double> WeakExp3::mix(const std::vector<double>& local, const std::vector<std::size_t>& arms,
                                  const std::vector<std::size_t>& dominating, std::size_t nodes, double gamma) {
  std::vector<double> out(nodes, 0.0);
  for (std::size_t i = 0; i < arms.size(); ++i) out[arms[i]] += (1.0 - gamma) * local[i];
  for (auto d : dominating) out[d] += gamma / static_cast<double>(dominating.size());
  return out;
}

WeakExp3::WeakExp3(FeedbackGraph graph, std::optional<std::size_t> excluded, LossRange range)
    : graph_(std::move(graph)), range_(range) {
  if (classify(graph_) == Observability::Unobservable)
    throw std::invalid_argument("weak EXP3 needs an observable graph");
  arms_ = all_except(graph_.size(), excluded);
  dominating_ = dominating_set(graph_);
  cumulative_.assign(arms_.size(), 0.0);
  play_.assign(graph_.size(), 0.0);
}

BaseLearnerMeta WeakExp3::meta() const {
  const double delta = static_cast<double>(dominating_.size());
  const double log_k = std::log(std::max(2.0, static_cast<double>(graph_.size())));
  return {216.0 * delta * log_k, 4.0 * delta * log_k, StabilityClass::TwoThirds};
}

void WeakExp3::prepare(const IwRound& round) {
  if (!(round.q > 0.0 && round.q <= 1.0)) throw std::invalid_argument("update probability must lie in (0, 1]");
  q_ = round.q;
  inv_sqrt_q_sum_ += 1.0 / std::sqrt(q_);
  min_q_ = std::min(min_q_, q_);
  const double delta = static_cast<double>(dominating_.size());
  const double log_k = std::log(std::max(2.0, static_cast<double>(graph_.size())));
  eta_ = 1.0 / (std::pow(std::sqrt(delta) * inv_sqrt_q_sum_ / log_k, 2.0 / 3.0) + 4.0 * delta / min_q_);
  gamma_ = std::sqrt(eta_ * delta / q_);
  if (gamma_ > 1.0) {
    gamma_ = 1.0;
    ++clamps_;
  }
  local_p_ = ftrl_argmin(cumulative_, Regularizer::neg_entropy(), eta_).vector();
  play_ = mix(local_p_, arms_, dominating_, graph_.size(), gamma_);
}

std::vector<double> WeakExp3::estimate(const Observation& obs, bool updated) const {
  std::vector<double> out(arms_.size(), 0.0);
  if (!updated) return out;
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    const std::size_t g = arms_[i];
    if (!graph_.has_edge(obs.played(), g)) continue;
    double observers = 0.0;
    for (auto j : graph_.in_neighbors(g)) observers += play_[j];
    out[i] = shift_loss(obs.loss(g), range_) / (q_ * observers);
  }
  return out;
}

void WeakExp3::update(const Observation& obs, bool updated) {
  const auto est = estimate(obs, updated);
  for (std::size_t i = 0; i < cumulative_.size(); ++i) cumulative_[i] += est[i];
}

std::vector<double> WeakExp3::target_losses(const RoundLoss& round) const {
  std::vector<double> out;
  for (auto a : arms_) out.push_back(shift_loss(round.values.at(a), range_));
  return out;
}

}  // namespace bobw
