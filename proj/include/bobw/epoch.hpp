#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bobw/learner.hpp"

namespace bobw {

using LearnerFactory = std::function<std::unique_ptr<Learner>(std::size_t candidate)>;

struct EpochSwitch {
  std::size_t epoch = 0;       // index of the epoch that ended (1-based)
  std::size_t round = 0;       // global round at which it ended
  std::size_t old_candidate = 0;
  std::size_t new_candidate = 0;
  std::size_t trigger_count = 0;
  double epoch_length = 0.0;
  double previous_length = 0.0;
};

std::string switch_csv_header();
std::string switch_csv_row(const EpochSwitch& s);

// min{c0^(1-a) t^a, (c1 ln t)^(1-a) count^a} + c2 ln t, with count = sum_s (1 - p_{s,u}).
double gsb_envelope(double c0, double c1, double c2, double alpha, double t, double count);

// Restarts an LSB learner with a new candidate whenever another action was played in at least
// half of the current epoch and the epoch is at least twice as long as the previous one.
class EpochReduction final : public Learner {
 public:
  EpochReduction(LearnerFactory factory, std::size_t num_actions, std::size_t horizon, std::uint64_t seed);

  std::string name() const override;
  std::size_t num_actions() const override { return num_actions_; }
  std::size_t act(std::size_t t, int context, Rng& rng) override;
  void observe(const Observation& obs) override;
  std::vector<double> action_distribution() const override { return inner_->action_distribution(); }
  SelfBoundingMeta meta() const override { return inner_->meta(); }
  std::optional<std::size_t> candidate() const override { return candidate_; }

  std::size_t epoch() const { return epoch_; }
  double epoch_start() const { return start_; }
  double previous_start() const { return previous_start_; }
  const std::vector<std::size_t>& counts() const { return counts_; }
  const std::vector<EpochSwitch>& switches() const { return switches_; }
  Learner& inner() { return *inner_; }

  // Switch rule on its own: returns the new candidate, if any.
  static std::optional<std::size_t> switch_target(double t, double start, double previous_start,
                                                  std::size_t candidate, const std::vector<std::size_t>& counts);

 private:
  void start_epoch(std::size_t candidate);

  LearnerFactory factory_;
  std::size_t num_actions_;
  double log_horizon_;
  std::uint64_t seed_;
  std::unique_ptr<Learner> inner_;
  Rng epoch_rng_;
  std::size_t candidate_ = 0;
  std::size_t epoch_ = 0;
  double start_ = 0.0;
  double previous_start_ = 0.0;
  std::size_t t_ = 0;
  std::vector<std::size_t> counts_;
  std::vector<EpochSwitch> switches_;
};

}  // namespace bobw
