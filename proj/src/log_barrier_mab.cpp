#include "bobw/base_learners.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bobw {

LogBarrierMab::LogBarrierMab(std::size_t num_arms, std::optional<std::size_t> excluded, std::size_t horizon,
                             StabilityClass stability)
    : num_arms_(num_arms), horizon_(horizon), stability_(stability) {
  if (num_arms_ == 0) throw std::invalid_argument("log-barrier learner needs arms");
  if (horizon_ == 0) throw std::invalid_argument("horizon must be positive");
  arms_ = all_except(num_arms_, excluded);
  const double t = static_cast<double>(horizon_);
  floor_ = 1.0 / (t * t * t * static_cast<double>(arms_.size()));
  cumulative_.assign(arms_.size(), 0.0);
  play_.assign(num_arms_, 0.0);
}

BaseLearnerMeta LogBarrierMab::meta() const {
  const double k = static_cast<double>(arms_.size());
  const double log_t = std::log(std::max<double>(2.0, static_cast<double>(horizon_)));
  return {64.0 * k * log_t, k * log_t, stability_};
}

void LogBarrierMab::prepare(const IwRound& round) {
  if (!(round.q > 0.0 && round.q <= 1.0)) throw std::invalid_argument("update probability must lie in (0, 1]");
  round_ = round;
  const double k = static_cast<double>(arms_.size());
  const double log_t = std::log(std::max<double>(2.0, static_cast<double>(horizon_)));
  eta_ = 0.125;
  if (inv_q_played_sum_ > 0.0) eta_ = std::min(eta_, std::sqrt(k * log_t / inv_q_played_sum_));
  local_p_ = ftrl_argmin(cumulative_, Regularizer::log_barrier(), eta_, floor_).vector();
  std::fill(play_.begin(), play_.end(), 0.0);
  for (std::size_t i = 0; i < arms_.size(); ++i) play_[arms_[i]] = local_p_[i];
}

std::vector<double> LogBarrierMab::estimate(const Observation& obs, bool updated) const {
  std::vector<double> out(arms_.size(), 0.0);
  if (!updated) return out;
  const auto it = std::find(arms_.begin(), arms_.end(), obs.played());
  if (it == arms_.end()) throw std::logic_error("log-barrier learner observed an action outside its set");
  const auto i = static_cast<std::size_t>(it - arms_.begin());
  out[i] = obs.loss(obs.played()) / (round_.q_for(obs.played()) * local_p_[i]);
  return out;
}

void LogBarrierMab::update(const Observation& obs, bool updated) {
  const auto est = estimate(obs, updated);
  for (std::size_t i = 0; i < cumulative_.size(); ++i) cumulative_[i] += est[i];
  inv_q_played_sum_ += 1.0 / round_.q_for(obs.played());
}

}  // namespace bobw
