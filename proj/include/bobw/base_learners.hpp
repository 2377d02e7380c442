#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bobw/design.hpp"
#include "bobw/environments.hpp"
#include "bobw/feedback.hpp"
#include "bobw/graphs.hpp"
#include "bobw/random.hpp"
#include "bobw/simplex.hpp"

namespace bobw {

enum class StabilityClass { Half, TwoThirds, DataDependentHalf, StrongHalf };

std::string to_string(StabilityClass c);

struct BaseLearnerMeta {
  double c1 = 0.0;
  double c2 = 0.0;
  StabilityClass stability = StabilityClass::Half;
};

// Externally supplied update probability for one round.
struct IwRound {
  double q = 1.0;
  // Strong variant: this action's feedback arrives with probability one.
  std::optional<std::size_t> always_observed;
  int context = -1;

  double q_for(std::size_t action) const {
    return (always_observed && *always_observed == action) ? 1.0 : q;
  }
};

// Base learner fed by an outer coin: prepare() fixes the play distribution for q_t, the caller
// samples, flips upd ~ Bernoulli(q_t) itself, and passes the result to update().
class IwLearner {
 public:
  virtual ~IwLearner() = default;

  virtual std::string name() const = 0;
  virtual BaseLearnerMeta meta() const = 0;
  // Number of global actions; play distributions are indexed by global action id.
  virtual std::size_t num_actions() const = 0;
  // Global ids of the actions the learner competes with (estimates are indexed in this order).
  virtual const std::vector<std::size_t>& arms() const = 0;

  virtual void prepare(const IwRound& round) = 0;
  virtual const std::vector<double>& play_distribution() const = 0;
  std::size_t sample(Rng& rng) const { return sample_weights(play_distribution(), rng); }

  // Loss estimate for the prepared round; pure, so it can be enumerated.
  virtual std::vector<double> estimate(const Observation& obs, bool updated) const = 0;
  virtual void update(const Observation& obs, bool updated) = 0;

  // Competing-arm losses the estimate targets (after any range shift).
  virtual std::vector<double> target_losses(const RoundLoss& round) const;

  // Learners whose play distribution ignores the current q_t may learn it after sampling.
  virtual bool supports_deferred_q() const { return false; }
  virtual void set_update_probability(const IwRound& round);
};

std::vector<std::size_t> all_except(std::size_t n, std::optional<std::size_t> excluded);

// Exponential weights over a finite action set in R^d with G-optimal exploration.
class Exp2 final : public IwLearner {
 public:
  Exp2(ActionSet actions, std::optional<std::size_t> excluded, double design_tolerance = 0.1);

  std::string name() const override { return "exp2"; }
  BaseLearnerMeta meta() const override;
  std::size_t num_actions() const override { return actions_.size(); }
  const std::vector<std::size_t>& arms() const override { return arms_; }
  void prepare(const IwRound& round) override;
  const std::vector<double>& play_distribution() const override { return play_; }
  std::vector<double> estimate(const Observation& obs, bool updated) const override;
  void update(const Observation& obs, bool updated) override;

  double learning_rate() const { return eta_; }
  double exploration_weight() const { return mix_; }
  std::size_t dimension() const { return dim_; }
  const std::vector<double>& design() const { return design_.weights; }

 private:
  ActionSet actions_;
  std::vector<std::size_t> arms_;
  std::vector<Eigen::VectorXd> local_;
  std::size_t dim_ = 0;
  double truncation_ = 0.0;
  ExplorationDesign design_;
  std::vector<double> cumulative_;
  double inv_q_sum_ = 0.0;
  double min_q_ = 1.0;
  double q_ = 1.0;
  double eta_ = 0.0;
  double mix_ = 0.0;
  std::vector<double> local_p_;
  std::vector<double> play_;
  Eigen::LDLT<Eigen::MatrixXd> covariance_;
};

// Exponential weights over a finite table of policies (context -> arm).
class Exp4 final : public IwLearner {
 public:
  Exp4(std::vector<std::vector<std::size_t>> policies, std::size_t num_arms, std::optional<std::size_t> excluded);

  std::string name() const override { return "exp4"; }
  BaseLearnerMeta meta() const override;
  std::size_t num_actions() const override { return policies_.size(); }
  const std::vector<std::size_t>& arms() const override { return arms_; }
  void prepare(const IwRound& round) override;
  const std::vector<double>& play_distribution() const override { return play_; }
  std::vector<double> estimate(const Observation& obs, bool updated) const override;
  void update(const Observation& obs, bool updated) override;

  double learning_rate() const { return eta_; }
  const std::vector<double>& arm_distribution() const { return arm_p_; }

 private:
  std::vector<std::vector<std::size_t>> policies_;
  std::size_t num_arms_;
  std::vector<std::size_t> arms_;
  std::vector<double> cumulative_;
  double inv_q_sum_ = 0.0;
  double q_ = 1.0;
  int context_ = -1;
  double eta_ = 0.0;
  std::vector<double> play_;
  std::vector<double> arm_p_;
};

// Tsallis-INF for strongly observable feedback graphs.
class TsallisGraph final : public IwLearner {
 public:
  TsallisGraph(FeedbackGraph graph, std::optional<std::size_t> excluded, LossRange range = LossRange::ZeroOne);

  std::string name() const override { return "tsallis-graph"; }
  BaseLearnerMeta meta() const override;
  std::size_t num_actions() const override { return graph_.size(); }
  const std::vector<std::size_t>& arms() const override { return arms_; }
  void prepare(const IwRound& round) override;
  const std::vector<double>& play_distribution() const override { return play_; }
  std::vector<double> estimate(const Observation& obs, bool updated) const override;
  void update(const Observation& obs, bool updated) override;
  std::vector<double> target_losses(const RoundLoss& round) const override;

  double exponent() const { return exponent_; }
  double learning_rate() const { return eta_; }
  double complexity() const { return complexity_; }
  // Loopless competing arms holding more than half the mass this round.
  const std::vector<std::size_t>& heavy_loopless() const { return heavy_; }
  // Shift c_t making estimate + c_t nonnegative for the given observation.
  double estimate_shift(const Observation& obs, bool updated) const;

 private:
  FeedbackGraph graph_;
  FeedbackGraph local_graph_;
  LossRange range_;
  std::vector<std::size_t> arms_;
  double exponent_ = 0.5;
  double complexity_ = 1.0;
  std::vector<double> cumulative_;
  double inv_q_sum_ = 0.0;
  double q_ = 1.0;
  double eta_ = 0.0;
  std::vector<double> local_p_;
  std::vector<double> play_;
  std::vector<std::size_t> heavy_;
};

// EXP3 with dominating-set exploration for weakly observable feedback graphs.
class WeakExp3 final : public IwLearner {
 public:
  WeakExp3(FeedbackGraph graph, std::optional<std::size_t> excluded, LossRange range = LossRange::ZeroOne);

  std::string name() const override { return "weak-exp3"; }
  BaseLearnerMeta meta() const override;
  std::size_t num_actions() const override { return graph_.size(); }
  const std::vector<std::size_t>& arms() const override { return arms_; }
  void prepare(const IwRound& round) override;
  const std::vector<double>& play_distribution() const override { return play_; }
  std::vector<double> estimate(const Observation& obs, bool updated) const override;
  void update(const Observation& obs, bool updated) override;
  std::vector<double> target_losses(const RoundLoss& round) const override;

  const std::vector<std::size_t>& dominating() const { return dominating_; }
  double learning_rate() const { return eta_; }
  double exploration() const { return gamma_; }
  std::size_t exploration_clamps() const { return clamps_; }

  // Mixture (1 - gamma) P + gamma * uniform(D) over all nodes; exposed for direct checks.
  static std::vector<double> mix(const std::vector<double>& local, const std::vector<std::size_t>& arms,
                                 const std::vector<std::size_t>& dominating, std::size_t nodes, double gamma);

 private:
  FeedbackGraph graph_;
  LossRange range_;
  std::vector<std::size_t> arms_;
  std::vector<std::size_t> dominating_;
  std::vector<double> cumulative_;
  double inv_sqrt_q_sum_ = 0.0;
  double min_q_ = 1.0;
  double q_ = 1.0;
  double eta_ = 0.0;
  double gamma_ = 0.0;
  std::size_t clamps_ = 0;
  std::vector<double> local_p_;
  std::vector<double> play_;
};

// Log-barrier FTRL for multi-armed bandits; supports per-action update probabilities.
class LogBarrierMab final : public IwLearner {
 public:
  LogBarrierMab(std::size_t num_arms, std::optional<std::size_t> excluded, std::size_t horizon,
                StabilityClass stability = StabilityClass::StrongHalf);

  std::string name() const override { return "log-barrier"; }
  BaseLearnerMeta meta() const override;
  std::size_t num_actions() const override { return num_arms_; }
  const std::vector<std::size_t>& arms() const override { return arms_; }
  void prepare(const IwRound& round) override;
  const std::vector<double>& play_distribution() const override { return play_; }
  std::vector<double> estimate(const Observation& obs, bool updated) const override;
  void update(const Observation& obs, bool updated) override;

  bool supports_deferred_q() const override { return true; }
  void set_update_probability(const IwRound& round) override { round_ = round; }

  double learning_rate() const { return eta_; }
  double floor() const { return floor_; }

 private:
  std::size_t num_arms_;
  std::vector<std::size_t> arms_;
  std::size_t horizon_;
  StabilityClass stability_;
  double floor_ = 0.0;
  std::vector<double> cumulative_;
  double inv_q_played_sum_ = 0.0;
  IwRound round_;
  double eta_ = 0.0;
  std::vector<double> local_p_;
  std::vector<double> play_;
};

}  // namespace bobw
