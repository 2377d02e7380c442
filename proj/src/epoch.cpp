#include "bobw/epoch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace bobw {

std::string switch_csv_header() { return "epoch,round,old_candidate,new_candidate,trigger_count,epoch_length,previous_length"; }

std::string switch_csv_row(const EpochSwitch& s) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%zu,%zu,%.12g,%.12g", s.epoch, s.round, s.old_candidate, s.new_candidate,
                s.trigger_count, s.epoch_length, s.previous_length);
  return buf;
}

double gsb_envelope(double c0, double c1, double c2, double alpha, double t, double count) {
  if (t < 1.0) return 0.0;
  const double log_t = std::log(std::max(t, 2.0));
  const double worst = std::pow(c0, 1.0 - alpha) * std::pow(t, alpha);
  const double self_bounding = std::pow(c1 * log_t, 1.0 - alpha) * std::pow(std::max(count, 0.0), alpha);
  return std::min(worst, self_bounding) + c2 * log_t;
}

EpochReduction::EpochReduction(LearnerFactory factory, std::size_t num_actions, std::size_t horizon, std::uint64_t seed)
    : factory_(std::move(factory)), num_actions_(num_actions), seed_(seed), counts_(num_actions, 0) {
  if (!factory_) throw std::invalid_argument("epoch reduction needs a learner factory");
  if (num_actions_ == 0) throw std::invalid_argument("epoch reduction needs at least one action");
  if (horizon == 0) throw std::invalid_argument("horizon must be positive");
  log_horizon_ = std::log(std::max<double>(2.0, static_cast<double>(horizon)));
  Rng init = derive_rng(seed_, {0});
  const auto first = static_cast<std::size_t>(uniform01(init) * static_cast<double>(num_actions_));
  start_epoch(first);
  previous_start_ = -std::max(inner_->meta().c2, 1.0) * log_horizon_;
  start_ = 0.0;
}

std::string EpochReduction::name() const { return "epoch(" + inner_->name() + ")"; }

void EpochReduction::start_epoch(std::size_t candidate) {
  ++epoch_;
  candidate_ = candidate;
  inner_ = factory_(candidate);
  if (!inner_ || inner_->num_actions() != num_actions_) throw std::invalid_argument("factory built an incompatible learner");
  epoch_rng_ = derive_rng(seed_, {epoch_});
  std::fill(counts_.begin(), counts_.end(), 0);
}

std::size_t EpochReduction::act(std::size_t t, int context, Rng&) {
  t_ = t;
  return inner_->act(t - static_cast<std::size_t>(start_), context, epoch_rng_);
}

std::optional<std::size_t> EpochReduction::switch_target(double t, double start, double previous_start,
                                                         std::size_t candidate, const std::vector<std::size_t>& counts) {
  const double length = t - start;
  if (length < 2.0 * (start - previous_start)) return std::nullopt;
  for (std::size_t x = 0; x < counts.size(); ++x)
    if (x != candidate && static_cast<double>(counts[x]) >= length / 2.0) return x;
  return std::nullopt;
}

void EpochReduction::observe(const Observation& obs) {
  inner_->observe(obs);
  ++counts_.at(obs.played());
  const double t = static_cast<double>(t_);
  const auto next = switch_target(t, start_, previous_start_, candidate_, counts_);
  if (!next) return;
  switches_.push_back(EpochSwitch{epoch_, t_, candidate_, *next, counts_[*next], t - start_, start_ - previous_start_});
  previous_start_ = start_;
  start_ = t;
  start_epoch(*next);
}

}  // namespace bobw
