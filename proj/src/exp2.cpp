#include "bobw/base_learners.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bobw {

Exp2::Exp2(ActionSet actions, std::optional<std::size_t> excluded, double design_tolerance)
    : actions_(std::move(actions)) {
  if (actions_.empty()) throw std::invalid_argument("exp2 needs actions");
  arms_ = all_except(actions_.size(), excluded);

  // Work in an orthonormal basis of the span of the competing actions.
  const auto d = actions_.front().size();
  Eigen::MatrixXd stacked(d, static_cast<Eigen::Index>(arms_.size()));
  for (std::size_t i = 0; i < arms_.size(); ++i) stacked.col(static_cast<Eigen::Index>(i)) = actions_[arms_[i]];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeThinU);
  svd.setThreshold(1e-10);
  const auto rank = svd.rank();
  if (rank == 0) throw std::invalid_argument("exp2 actions are all zero");
  const Eigen::MatrixXd basis = svd.matrixU().leftCols(rank);
  for (auto a : arms_) local_.push_back(basis.transpose() * actions_[a]);
  dim_ = static_cast<std::size_t>(rank);

  design_ = john_exploration(local_, design_tolerance);
  truncation_ = 1.0 / (2.0 * static_cast<double>(dim_) * (1.0 + design_tolerance));
  cumulative_.assign(arms_.size(), 0.0);
  play_.assign(actions_.size(), 0.0);
}

BaseLearnerMeta Exp2::meta() const {
  const double log_n = std::log(std::max<double>(2.0, static_cast<double>(arms_.size())));
  const double d = static_cast<double>(dim_);
  return {49.0 * d * log_n, 2.0 * d * log_n, StabilityClass::Half};
}

void Exp2::prepare(const IwRound& round) {
  if (!(round.q > 0.0 && round.q <= 1.0)) throw std::invalid_argument("update probability must lie in (0, 1]");
  q_ = round.q;
  inv_q_sum_ += 1.0 / q_;
  min_q_ = std::min(min_q_, q_);
  const double d = static_cast<double>(dim_);
  const double log_n = std::log(std::max<double>(2.0, static_cast<double>(arms_.size())));
  eta_ = std::min(std::sqrt(log_n / (d * inv_q_sum_)), truncation_ * min_q_);
  mix_ = d * eta_ / q_;

  local_p_ = ftrl_argmin(cumulative_, Regularizer::neg_entropy(), eta_).vector();
  for (std::size_t i = 0; i < arms_.size(); ++i) local_p_[i] = (1.0 - mix_) * local_p_[i] + mix_ * design_.weights[i];
  std::fill(play_.begin(), play_.end(), 0.0);
  for (std::size_t i = 0; i < arms_.size(); ++i) play_[arms_[i]] = local_p_[i];

  Eigen::MatrixXd cov = information_matrix(local_, local_p_);
  cov.diagonal().array() += design_ridge(cov);
  covariance_.compute(cov);
}

std::vector<double> Exp2::estimate(const Observation& obs, bool updated) const {
  std::vector<double> out(arms_.size(), 0.0);
  if (!updated) return out;
  const auto it = std::find(arms_.begin(), arms_.end(), obs.played());
  if (it == arms_.end()) throw std::logic_error("exp2 observed an action outside its set");
  const Eigen::VectorXd& played = local_[static_cast<std::size_t>(it - arms_.begin())];
  const Eigen::VectorXd direction = covariance_.solve(played) * (obs.loss(obs.played()) / q_);
  for (std::size_t i = 0; i < arms_.size(); ++i) out[i] = local_[i].dot(direction);
  return out;
}

void Exp2::update(const Observation& obs, bool updated) {
  const auto est = estimate(obs, updated);
  for (std::size_t i = 0; i < cumulative_.size(); ++i) cumulative_[i] += est[i];
}

}  // namespace bobw
