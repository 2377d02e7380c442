#include "bobw/base_learners.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bobw {

Exp4::Exp4(std::vector<std::vector<std::size_t>> policies, std::size_t num_arms, std::optional<std::size_t> excluded)
    : policies_(std::move(policies)), num_arms_(num_arms) {
  if (policies_.empty()) throw std::invalid_argument("exp4 needs policies");
  for (const auto& p : policies_)
    for (auto a : p)
      if (a >= num_arms_) throw std::invalid_argument("policy maps to an unknown arm");
  arms_ = all_except(policies_.size(), excluded);
  cumulative_.assign(arms_.size(), 0.0);
  play_.assign(policies_.size(), 0.0);
}

BaseLearnerMeta Exp4::meta() const {
  const double log_n = std::log(std::max<double>(2.0, static_cast<double>(arms_.size())));
  return {4.0 * static_cast<double>(num_arms_) * log_n, 0.0, StabilityClass::Half};
}

void Exp4::prepare(const IwRound& round) {
  if (!(round.q > 0.0 && round.q <= 1.0)) throw std::invalid_argument("update probability must lie in (0, 1]");
  if (round.context < 0 || static_cast<std::size_t>(round.context) >= policies_.front().size())
    throw std::invalid_argument("exp4 needs a valid context");
  q_ = round.q;
  context_ = round.context;
  inv_q_sum_ += 1.0 / q_;
  const double log_n = std::log(std::max<double>(2.0, static_cast<double>(arms_.size())));
  eta_ = std::sqrt(log_n / (static_cast<double>(num_arms_) * inv_q_sum_));

  const auto weights = ftrl_argmin(cumulative_, Regularizer::neg_entropy(), eta_);
  std::fill(play_.begin(), play_.end(), 0.0);
  arm_p_.assign(num_arms_, 0.0);
  const auto x = static_cast<std::size_t>(context_);
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    play_[arms_[i]] = weights[i];
    arm_p_[policies_[arms_[i]][x]] += weights[i];
  }
}

std::vector<double> Exp4::estimate(const Observation& obs, bool updated) const {
  std::vector<double> out(arms_.size(), 0.0);
  if (!updated) return out;
  const auto x = static_cast<std::size_t>(context_);
  const std::size_t arm = policies_.at(obs.played())[x];
  const double value = obs.loss(obs.played()) / (q_ * arm_p_[arm]);
  for (std::size_t i = 0; i < arms_.size(); ++i)
    if (policies_[arms_[i]][x] == arm) out[i] = value;
  return out;
}

void Exp4::update(const Observation& obs, bool updated) {
  const auto est = estimate(obs, updated);
  for (std::size_t i = 0; i < cumulative_.size(); ++i) cumulative_[i] += est[i];
}

}  // namespace bobw
