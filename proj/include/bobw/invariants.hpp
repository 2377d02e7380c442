#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bobw/base_learners.hpp"
#include "bobw/feedback.hpp"

namespace bobw {

struct CheckItem {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct InvariantReport {
  std::vector<CheckItem> items;
  std::size_t failures() const;
  void append(const InvariantReport& other);
};

// Exact E[estimate] minus the target losses, enumerating the play draw and the update coin.
struct Enumeration {
  std::vector<double> expected;
  std::vector<double> target;
  double max_error = 0.0;
};
Enumeration enumerate_estimate(IwLearner& learner, const IwRound& round, const RoundLoss& loss,
                               const FeedbackModel& feedback);

// Wraps a base learner and negates the first coordinate of every estimate.
class SignFlippedLearner final : public IwLearner {
 public:
  explicit SignFlippedLearner(IwLearner& inner) : inner_(inner) {}
  std::string name() const override { return inner_.name() + "(sign-flipped)"; }
  BaseLearnerMeta meta() const override { return inner_.meta(); }
  std::size_t num_actions() const override { return inner_.num_actions(); }
  const std::vector<std::size_t>& arms() const override { return inner_.arms(); }
  void prepare(const IwRound& round) override { inner_.prepare(round); }
  const std::vector<double>& play_distribution() const override { return inner_.play_distribution(); }
  std::vector<double> estimate(const Observation& obs, bool updated) const override;
  void update(const Observation& obs, bool updated) override { inner_.update(obs, updated); }
  std::vector<double> target_losses(const RoundLoss& round) const override { return inner_.target_losses(round); }
  bool supports_deferred_q() const override { return inner_.supports_deferred_q(); }
  void set_update_probability(const IwRound& round) override { inner_.set_update_probability(round); }

 private:
  IwLearner& inner_;
};

InvariantReport unbiasedness_suite(std::uint64_t seed = 1);
InvariantReport negative_control_suite(std::uint64_t seed = 1);
InvariantReport stability_suite(std::size_t instances = 10000, std::uint64_t seed = 1);
// Exhaustive over all graphs with at most `exhaustive_nodes` nodes, plus random graphs.
InvariantReport graph_suite(std::size_t exhaustive_nodes = 5, std::size_t random_graphs = 100,
                            std::size_t random_max_nodes = 12, std::uint64_t seed = 1);
// Short runs of every corral variant with the bonus audit in record mode.
InvariantReport audit_suite(std::size_t horizon = 4096, std::size_t seeds = 3);

// Scopes: unbiasedness, negative-control, stability, graphs, audit; empty runs all.
InvariantReport check_invariants(const std::vector<std::string>& scope);

}  // namespace bobw
