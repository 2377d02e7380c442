#include "bobw/base_learners.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bobw {

namespace {
double shift_loss(double loss, LossRange range) { return range == LossRange::MinusOneOne ? 0.5 * (loss + 1.0) : loss; }

std::size_t local_index(const std::vector<std::size_t>& arms, std::size_t global) {
  const auto it = std::find(arms.begin(), arms.end(), global);
  if (it == arms.end()) throw std::logic_error("action outside the learner's set");
  return static_cast<std::size_t>(it - arms.begin());
}
}  // namespace

TsallisGraph::TsallisGraph(FeedbackGraph graph, std::optional<std::size_t> excluded, LossRange range)
    : graph_(std::move(graph)), range_(range) {
  if (classify(graph_) != Observability::Strong)
    throw std::invalid_argument("Tsallis-INF graph learner needs a strongly observable graph");
  arms_ = all_except(graph_.size(), excluded);
  local_graph_ = excluded ? graph_.without_node(*excluded) : graph_;
  const double k = static_cast<double>(graph_.size());
  exponent_ = graph_.size() >= 3 ? 1.0 - 1.0 / std::log(k) : 0.5;
  const double log_k = std::log(std::max(2.0, k));
  complexity_ = 1.0 + std::min(static_cast<double>(weak_independence_number(local_graph_)),
                               static_cast<double>(independence_number(local_graph_)) * log_k);
  cumulative_.assign(arms_.size(), 0.0);
  play_.assign(graph_.size(), 0.0);
}

BaseLearnerMeta TsallisGraph::meta() const {
  const double log_k = std::log(std::max(2.0, static_cast<double>(graph_.size())));
  return {324.0 * complexity_ * log_k, 0.0, StabilityClass::Half};
}

void TsallisGraph::prepare(const IwRound& round) {
  if (!(round.q > 0.0 && round.q <= 1.0)) throw std::invalid_argument("update probability must lie in (0, 1]");
  q_ = round.q;
  inv_q_sum_ += 1.0 / q_;
  const double log_k = std::log(std::max(2.0, static_cast<double>(graph_.size())));
  eta_ = std::sqrt(log_k / (inv_q_sum_ * complexity_));
  local_p_ = ftrl_argmin(cumulative_, Regularizer::tsallis(exponent_), eta_).vector();
  std::fill(play_.begin(), play_.end(), 0.0);
  heavy_.clear();
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    play_[arms_[i]] = local_p_[i];
    if (!local_graph_.has_self_loop(i) && local_p_[i] > 0.5) heavy_.push_back(i);
  }
}

std::vector<double> TsallisGraph::estimate(const Observation& obs, bool updated) const {
  std::vector<double> out(arms_.size(), 0.0);
  for (auto h : heavy_) out[h] = 1.0;
  if (!updated) return out;
  const std::size_t played = local_index(arms_, obs.played());
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    if (!local_graph_.has_edge(played, i)) continue;
    double observers = 0.0;
    for (auto j : local_graph_.in_neighbors(i)) observers += local_p_[j];
    const double heavy = std::find(heavy_.begin(), heavy_.end(), i) != heavy_.end() ? 1.0 : 0.0;
    out[i] += (shift_loss(obs.loss(arms_[i]), range_) - heavy) / (q_ * observers);
  }
  return out;
}

double TsallisGraph::estimate_shift(const Observation& obs, bool updated) const {
  if (!updated || heavy_.empty()) return 0.0;
  const std::size_t played = local_index(arms_, obs.played());
  const std::size_t h = heavy_.front();
  if (!local_graph_.has_edge(played, h)) return 0.0;
  double observers = 0.0;
  for (auto j : local_graph_.in_neighbors(h)) observers += local_p_[j];
  return (1.0 - shift_loss(obs.loss(arms_[h]), range_)) / (q_ * observers);
}

void TsallisGraph::update(const Observation& obs, bool updated) {
  const auto est = estimate(obs, updated);
  for (std::size_t i = 0; i < cumulative_.size(); ++i) cumulative_[i] += est[i];
}

std::vector<double> TsallisGraph::target_losses(const RoundLoss& round) const {
  std::vector<double> out;
  for (auto a : arms_) out.push_back(shift_loss(round.values.at(a), range_));
  return out;
}

}  // namespace bobw
