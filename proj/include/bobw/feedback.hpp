#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "bobw/environments.hpp"
#include "bobw/graphs.hpp"

namespace bobw {

// Losses revealed after one play; reading an unrevealed entry throws.
class Observation {
 public:
  Observation(const RoundLoss& round, std::size_t played, std::vector<std::size_t> revealed);
  static Observation hidden(const RoundLoss& round, std::size_t played);
  // Same round with nothing revealed, attributed to `played`.
  Observation withheld(std::size_t played) const { return Observation(*round_, played, {}); }

  std::size_t played() const { return played_; }
  int context() const { return round_->context; }
  std::size_t t() const { return round_->t; }
  bool revealed(std::size_t action) const;
  double loss(std::size_t action) const;
  const std::vector<std::size_t>& revealed_actions() const { return revealed_; }

 private:
  const RoundLoss* round_;
  std::size_t played_;
  std::vector<std::size_t> revealed_;
};

// Which losses a play reveals: its own (bandit) or its out-neighbors in a feedback graph.
class FeedbackModel {
 public:
  static FeedbackModel bandit();
  static FeedbackModel graph(FeedbackGraph g);

  std::vector<std::size_t> revealed_by(std::size_t played) const;
  Observation observe(const RoundLoss& round, std::size_t played) const;
  const FeedbackGraph* feedback_graph() const { return graph_ ? &*graph_ : nullptr; }

 private:
  std::optional<FeedbackGraph> graph_;
};

}  // namespace bobw
