#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bobw/base_learners.hpp"
#include "bobw/feedback.hpp"
#include "bobw/random.hpp"

namespace bobw {

// Constants of a local (or global) self-bounding regret guarantee.
struct SelfBoundingMeta {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double alpha = 0.5;
};

// Full-information-free player: act() picks an action, observe() receives what it reveals.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual std::string name() const = 0;
  virtual std::size_t num_actions() const = 0;
  // t counts rounds since this instance was created, starting at 1.
  virtual std::size_t act(std::size_t t, int context, Rng& rng) = 0;
  virtual void observe(const Observation& obs) = 0;
  // Distribution of the action chosen by the latest act().
  virtual std::vector<double> action_distribution() const = 0;
  virtual SelfBoundingMeta meta() const = 0;
  virtual std::optional<std::size_t> candidate() const { return std::nullopt; }
};

// A base learner run on its own: every round updates (q_t = 1).
class BaseOnly final : public Learner {
 public:
  explicit BaseOnly(std::unique_ptr<IwLearner> base);
  std::string name() const override { return base_->name(); }
  std::size_t num_actions() const override { return base_->num_actions(); }
  std::size_t act(std::size_t t, int context, Rng& rng) override;
  void observe(const Observation& obs) override;
  std::vector<double> action_distribution() const override { return base_->play_distribution(); }
  SelfBoundingMeta meta() const override;
  IwLearner& base() { return *base_; }

 private:
  std::unique_ptr<IwLearner> base_;
};

}  // namespace bobw
