#include "bobw/feedback.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace bobw {

Observation::Observation(const RoundLoss& round, std::size_t played, std::vector<std::size_t> revealed)
    : round_(&round), played_(played), revealed_(std::move(revealed)) {}

Observation Observation::hidden(const RoundLoss& round, std::size_t played) { return Observation(round, played, {}); }

bool Observation::revealed(std::size_t action) const {
  return std::find(revealed_.begin(), revealed_.end(), action) != revealed_.end();
}

double Observation::loss(std::size_t action) const {
  if (!revealed(action))
    throw std::logic_error("loss of action " + std::to_string(action) + " was not revealed by playing " +
                           std::to_string(played_));
  return round_->values.at(action);
}

FeedbackModel FeedbackModel::bandit() { return FeedbackModel(); }

FeedbackModel FeedbackModel::graph(FeedbackGraph g) {
  FeedbackModel m;
  m.graph_ = std::move(g);
  return m;
}

std::vector<std::size_t> FeedbackModel::revealed_by(std::size_t played) const {
  if (graph_) return graph_->out_neighbors(played);
  return {played};
}

Observation FeedbackModel::observe(const RoundLoss& round, std::size_t played) const {
  return Observation(round, played, revealed_by(played));
}

}  // namespace bobw
