#include "bobw/corral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace bobw {

namespace {

// Hybrid regularizer -(1/eta)(1/(1-a)) sum q^a + 8 c2 sum ln(1/q); without a barrier part the
// equivalent Tsallis form with its rescaled learning rate.
Regularizer side_regularizer(double exponent, double eta, double c2, double* scale) {
  if (c2 > 0.0) {
    *scale = 1.0;
    return Regularizer::hybrid(exponent, 1.0 / eta, 8.0 * c2);
  }
  *scale = eta / exponent;
  return Regularizer::tsallis(exponent);
}

double barrier_rate(double c2) { return c2 > 0.0 ? 1.0 / (8.0 * c2) : 0.0; }

}  // namespace

std::string trace_csv_header() {
  return "t,side,q_candidate,q_base,qbar_base,eta,bonus,bonus_tsallis_step,bonus_barrier_step,tsallis_condition,"
         "barrier_condition,conditions_hold";
}

std::string trace_csv_row(const CorralTraceRow& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%zu,%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%d", r.t, r.side,
                r.q_candidate, r.q_base, r.qbar_base, r.eta, r.bonus, r.bonus_tsallis_step, r.bonus_barrier_step,
                r.tsallis_condition, r.barrier_condition, r.conditions_hold ? 1 : 0);
  return buf;
}

bool BonusAudit::check(std::size_t t, const char* condition, double value, double cap) {
  ++checks_;
  worst_ = std::max(worst_, value / cap);
  const bool ok = value <= cap * (1.0 + 1e-12);
  if (tally_) {
    ++tally_->checks;
    tally_->worst_ratio = std::max(tally_->worst_ratio, value / cap);
    if (!ok) ++tally_->violations;
  }
  if (ok) return true;
  ++violations_;
  if (policy_ == AuditPolicy::Abort) {
    std::ostringstream msg;
    msg << "bonus condition " << condition << " violated at round " << t << ": " << value << " > " << cap;
    throw BonusConditionViolation(msg.str());
  }
  return false;
}

CorralBase::CorralBase(std::size_t candidate, std::unique_ptr<IwLearner> base, CorralOptions options)
    : candidate_(candidate), base_(std::move(base)), options_(std::move(options)), audit_(options_.audit, options_.tally) {
  if (!base_) throw std::invalid_argument("corral needs a base learner");
  if (candidate_ >= base_->num_actions()) throw std::invalid_argument("candidate out of range");
}

std::vector<double> CorralBase::action_distribution() const {
  auto p = base_->play_distribution();
  for (auto& x : p) x *= q_[1];
  p[candidate_] += q_[0];
  return p;
}

void CorralBase::solve(const Regularizer& reg, double scale, std::span<const double> extra) {
  std::array<double, 2> effective{cumulative_[0], cumulative_[1] - bonus_};
  for (std::size_t i = 0; i < extra.size(); ++i) effective[i] += extra[i];
  const auto dist = ftrl_argmin(effective, reg, scale);
  qbar_ = {dist[0], dist[1]};
}

void CorralBase::record(CorralTraceRow row) {
  if (options_.keep_trace) trace_.push_back(row);
}

// ---------------------------------------------------------------------------------------------

CorralHalf::CorralHalf(std::size_t candidate, std::unique_ptr<IwLearner> base, CorralOptions options)
    : CorralBase(candidate, std::move(base), std::move(options)) {
  const auto m = base_->meta();
  c1_ = m.c1;
  c2_ = m.c2;
  if (!(c1_ > 0.0)) throw std::invalid_argument("corral needs c1 > 0");
  if (options_.surrogate_graph && options_.surrogate_graph->size() != base_->num_actions())
    throw std::invalid_argument("surrogate graph size differs from the action count");
}

double CorralHalf::learning_rate(std::size_t t, double c1) {
  return 1.0 / (std::sqrt(static_cast<double>(t)) + 8.0 * std::sqrt(c1));
}

double CorralHalf::bonus_for(double c1, double c2, std::span<const double> q_base_history) {
  if (q_base_history.empty()) return 0.0;
  double inv_sum = 0.0;
  double min_q = 1.0;
  for (double q : q_base_history) {
    inv_sum += 1.0 / q;
    min_q = std::min(min_q, q);
  }
  return std::sqrt(c1 * inv_sum) + c2 / min_q;
}

std::array<double, 2> CorralHalf::mix(const std::array<double, 2>& qbar, std::size_t t) {
  const double tt = static_cast<double>(t) * static_cast<double>(t);
  const double keep = 1.0 - 1.0 / (2.0 * tt);
  return {keep * qbar[0] + 1.0 / (4.0 * tt), keep * qbar[1] + 1.0 / (4.0 * tt)};
}

std::array<double, 2> CorralHalf::loss_estimate(int side, double loss, const std::array<double, 2>& q) {
  std::array<double, 2> z{-1.0, -1.0};
  z[static_cast<std::size_t>(side - 1)] += (loss + 1.0) / q[static_cast<std::size_t>(side - 1)];
  return z;
}

SelfBoundingMeta CorralHalf::meta() const { return {c1_, c1_, c2_, 0.5}; }

std::size_t CorralHalf::act(std::size_t t, int context, Rng& rng) {
  t_ = t;
  context_ = context;
  eta_ = learning_rate(t, c1_);
  double scale = 1.0;
  const auto reg = side_regularizer(0.5, eta_, c2_, &scale);
  solve(reg, scale);
  q_ = mix(qbar_, t);
  base_->prepare(IwRound{q_[1], std::nullopt, context});
  proposed_ = base_->sample(rng);
  side_ = bernoulli(rng, q_[1]) ? 2 : 1;
  played_ = side_ == 1 ? candidate_ : proposed_;
  return played_;
}

void CorralHalf::observe(const Observation& obs) {
  double loss = 0.0;
  if (options_.surrogate_graph) {
    loss = surrogate_played_loss(*options_.surrogate_graph, candidate_, played_,
                                 [&](std::size_t j) { return obs.loss(j); }, base_->play_distribution());
  } else {
    loss = obs.loss(played_);
  }
  const auto z = loss_estimate(side_, loss, q_);
  cumulative_[0] += z[0];
  cumulative_[1] += z[1];
  if (side_ == 2) base_->update(obs, true);
  else base_->update(obs.withheld(proposed_), false);

  const double prev_ts = std::sqrt(c1_ * inv_q_sum_);
  const double prev_lo = t_ > 1 ? c2_ / min_q_ : 0.0;
  inv_q_sum_ += 1.0 / q_[1];
  min_q_ = std::min(min_q_, q_[1]);
  const double next_ts = std::sqrt(c1_ * inv_q_sum_);
  const double next_lo = c2_ / min_q_;
  CorralTraceRow row{t_, side_, q_[0], q_[1], qbar_[1], eta_, 0.0, next_ts - prev_ts, next_lo - prev_lo, 0.0, 0.0, true};
  row.tsallis_condition = eta_ * std::sqrt(qbar_[1]) * row.bonus_tsallis_step;
  row.barrier_condition = barrier_rate(c2_) * qbar_[1] * row.bonus_barrier_step;
  row.conditions_hold = audit_.check(t_, "tsallis", row.tsallis_condition);
  row.conditions_hold = audit_.check(t_, "log-barrier", row.barrier_condition) && row.conditions_hold;
  bonus_ = next_ts + next_lo;
  row.bonus = bonus_;
  record(row);
}

// ---------------------------------------------------------------------------------------------

CorralTwoThirds::CorralTwoThirds(std::size_t candidate, std::unique_ptr<IwLearner> base, FeedbackGraph graph,
                                 CorralOptions options)
    : CorralBase(candidate, std::move(base), std::move(options)), graph_(std::move(graph)) {
  const auto m = base_->meta();
  c1_ = m.c1;
  c2_ = m.c2;
  if (!(c1_ > 0.0)) throw std::invalid_argument("corral needs c1 > 0");
  if (graph_.size() != base_->num_actions()) throw std::invalid_argument("graph size differs from the action count");
  if (classify(graph_) == Observability::Unobservable) throw std::invalid_argument("graph is not observable");
}

double CorralTwoThirds::learning_rate(std::size_t t, double c1) {
  return 1.0 / (std::pow(static_cast<double>(t), 2.0 / 3.0) + 8.0 * std::cbrt(c1));
}

double CorralTwoThirds::gamma_for(double eta, double q_base) {
  return std::max(std::sqrt(eta) * std::pow(q_base, 2.0 / 3.0), eta * std::cbrt(q_base));
}

double CorralTwoThirds::solve_gamma(double eta, double qbar_base) {
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid - gamma_for(eta, (1.0 - mid) * qbar_base) < 0.0) lo = mid; else hi = mid;
  }
  return hi;
}

std::array<double, 2> CorralTwoThirds::loss_estimate(int side, bool reveal, double loss, double gamma,
                                                     const std::array<double, 2>& qbar) {
  std::array<double, 2> z{0.0, 0.0};
  if (reveal) {
    const auto i = static_cast<std::size_t>(side - 1);
    z[i] = loss / (gamma * qbar[i]);
  }
  return z;
}

std::size_t CorralTwoThirds::revealing_action(std::size_t target) const {
  if (graph_.has_self_loop(target)) return target;
  return graph_.in_neighbors(target).front();
}

SelfBoundingMeta CorralTwoThirds::meta() const { return {c1_, c1_, std::cbrt(c1_) + c2_, 2.0 / 3.0}; }

std::size_t CorralTwoThirds::act(std::size_t t, int context, Rng& rng) {
  t_ = t;
  context_ = context;
  eta_ = learning_rate(t, c1_);
  double scale = 1.0;
  const auto reg = side_regularizer(2.0 / 3.0, eta_, c2_, &scale);
  solve(reg, scale);
  gamma_ = solve_gamma(eta_, qbar_[1]);
  q_ = {qbar_[0], (1.0 - gamma_) * qbar_[1]};
  base_->prepare(IwRound{q_[1], std::nullopt, context});
  proposed_ = base_->sample(rng);
  side_ = bernoulli(rng, qbar_[1]) ? 2 : 1;
  target_ = side_ == 1 ? candidate_ : proposed_;
  reveal_ = bernoulli(rng, gamma_);
  played_ = reveal_ ? revealing_action(target_) : target_;
  return played_;
}

std::vector<double> CorralTwoThirds::action_distribution() const {
  auto target = base_->play_distribution();
  for (auto& x : target) x *= qbar_[1];
  target[candidate_] += qbar_[0];
  std::vector<double> p(target.size(), 0.0);
  for (std::size_t a = 0; a < target.size(); ++a) {
    p[a] += (1.0 - gamma_) * target[a];
    p[revealing_action(a)] += gamma_ * target[a];
  }
  return p;
}

void CorralTwoThirds::observe(const Observation& obs) {
  const double loss = reveal_ ? obs.loss(target_) : 0.0;
  const auto z = loss_estimate(side_, reveal_, loss, gamma_, qbar_);
  cumulative_[0] += z[0];
  cumulative_[1] += z[1];
  if (side_ == 2 && !reveal_) base_->update(obs, true);
  else base_->update(obs.withheld(proposed_), false);

  const double prev_ts = std::cbrt(c1_) * std::pow(inv_sqrt_q_sum_, 2.0 / 3.0);
  const double prev_lo = t_ > 1 ? c2_ / min_q_ : 0.0;
  inv_sqrt_q_sum_ += 1.0 / std::sqrt(q_[1]);
  min_q_ = std::min(min_q_, q_[1]);
  const double next_ts = std::cbrt(c1_) * std::pow(inv_sqrt_q_sum_, 2.0 / 3.0);
  const double next_lo = c2_ / min_q_;
  CorralTraceRow row{t_, side_, q_[0], q_[1], qbar_[1], eta_, 0.0, next_ts - prev_ts, next_lo - prev_lo, 0.0, 0.0, true};
  row.tsallis_condition = eta_ * std::cbrt(qbar_[1]) * row.bonus_tsallis_step;
  row.barrier_condition = barrier_rate(c2_) * qbar_[1] * row.bonus_barrier_step;
  row.conditions_hold = audit_.check(t_, "tsallis", row.tsallis_condition);
  row.conditions_hold = audit_.check(t_, "log-barrier", row.barrier_condition) && row.conditions_hold;
  bonus_ = next_ts + next_lo;
  row.bonus = bonus_;
  record(row);
}

// ---------------------------------------------------------------------------------------------

CorralDataDependent::CorralDataDependent(std::size_t candidate, std::unique_ptr<IwLearner> base, std::size_t horizon,
                                         DataDependence order, Predictor predictor, CorralOptions options)
    : CorralBase(candidate, std::move(base), std::move(options)),
      horizon_(static_cast<double>(horizon)),
      order_(order),
      predictor_(std::move(predictor)) {
  const auto m = base_->meta();
  c1_ = m.c1;
  c2_ = m.c2;
  if (!(c1_ > 0.0)) throw std::invalid_argument("corral needs c1 > 0");
  if (horizon < 2) throw std::invalid_argument("data-dependent corral needs a horizon of at least 2");
  if (!base_->supports_deferred_q())
    throw std::invalid_argument("data-dependent corral needs a base whose play ignores the current q_t");
}

double CorralDataDependent::learning_rate(double variation, double c1, double c2, double horizon) {
  const double log_t = std::log(horizon);
  return 0.25 * std::sqrt(log_t) / std::sqrt(variation + (c1 + c2 * c2) * log_t);
}

std::array<double, 2> CorralDataDependent::loss_estimate(int side, double loss, const std::array<double, 2>& prediction,
                                                         const std::array<double, 2>& q) {
  std::array<double, 2> z = prediction;
  const auto i = static_cast<std::size_t>(side - 1);
  z[i] += (loss - prediction[i]) / q[i];
  return z;
}

SelfBoundingMeta CorralDataDependent::meta() const { return {c1_, c1_, std::sqrt(c1_) + c2_, 0.5}; }

std::size_t CorralDataDependent::act(std::size_t t, int context, Rng& rng) {
  t_ = t;
  context_ = context;
  round_prediction_ = predictor_ ? predictor_(t) : std::vector<double>(base_->num_actions(), 0.0);
  if (round_prediction_.size() != base_->num_actions()) throw std::invalid_argument("prediction has the wrong size");
  base_->prepare(IwRound{1.0, std::nullopt, context});
  proposed_ = base_->sample(rng);
  prediction_ = {round_prediction_[candidate_], round_prediction_[proposed_]};
  eta_ = learning_rate(variation_, c1_, c2_, horizon_);
  solve(Regularizer::log_barrier(), eta_, prediction_);
  q_ = CorralHalf::mix(qbar_, t);
  base_->set_update_probability(IwRound{q_[1], std::nullopt, context});
  side_ = bernoulli(rng, q_[1]) ? 2 : 1;
  played_ = side_ == 1 ? candidate_ : proposed_;
  return played_;
}

void CorralDataDependent::observe(const Observation& obs) {
  const double loss = obs.loss(played_);
  const auto z = loss_estimate(side_, loss, prediction_, q_);
  cumulative_[0] += z[0];
  cumulative_[1] += z[1];
  const double deviation = loss - round_prediction_[played_];
  const double xi = order_ == DataDependence::FirstOrder ? loss : deviation * deviation;
  for (int i = 1; i <= 2; ++i) {
    const double miss = (side_ == i ? 1.0 : 0.0) - q_[static_cast<std::size_t>(i - 1)];
    variation_ += miss * miss * xi;
  }
  if (side_ == 2) base_->update(obs, true);
  else base_->update(obs.withheld(proposed_), false);

  const double prev = bonus_;
  if (side_ == 2) weighted_sum_ += xi / (q_[1] * q_[1]);
  min_q_ = std::min(min_q_, q_[1]);
  const double next_ts = std::sqrt(c1_ * weighted_sum_);
  const double next_lo = c2_ / min_q_;
  bonus_ = next_ts + next_lo;
  CorralTraceRow row{t_, side_, q_[0], q_[1], qbar_[1], eta_, bonus_, 0.0, 0.0, 0.0, 0.0, true};
  const double step = bonus_ - prev;
  row.bonus_tsallis_step = step;
  row.tsallis_condition = eta_ * qbar_[1] * step;
  row.conditions_hold = audit_.check(t_, "log-barrier", row.tsallis_condition);
  record(row);
}

// ---------------------------------------------------------------------------------------------

CorralStrong::CorralStrong(std::size_t candidate, std::unique_ptr<IwLearner> base, CorralOptions options)
    : CorralBase(candidate, std::move(base), std::move(options)) {
  const auto m = base_->meta();
  c1_ = m.c1;
  c2_ = m.c2;
  if (!(c1_ > 0.0)) throw std::invalid_argument("corral needs c1 > 0");
  if (base_->arms().size() != base_->num_actions())
    throw std::invalid_argument("strong corral needs a base over the full action set");
  if (!base_->supports_deferred_q())
    throw std::invalid_argument("strong corral needs a base whose play ignores the current q_t");
}

double CorralStrong::learning_rate(std::size_t off_candidate_count, double c1) {
  return 1.0 / (std::sqrt(static_cast<double>(off_candidate_count)) + 8.0 * std::sqrt(c1));
}

SelfBoundingMeta CorralStrong::meta() const { return {c1_, c1_, std::sqrt(c1_) + c2_, 0.5}; }

std::size_t CorralStrong::act(std::size_t t, int context, Rng& rng) {
  t_ = t;
  context_ = context;
  base_->prepare(IwRound{1.0, candidate_, context});
  proposed_ = base_->sample(rng);
  if (proposed_ != candidate_) ++off_candidate_;
  eta_ = learning_rate(off_candidate_, c1_);
  double scale = 1.0;
  const auto reg = side_regularizer(0.5, eta_, c2_, &scale);
  solve(reg, scale);
  q_ = CorralHalf::mix(qbar_, t);
  base_->set_update_probability(IwRound{q_[1], candidate_, context});
  side_ = bernoulli(rng, q_[1]) ? 2 : 1;
  played_ = side_ == 1 ? candidate_ : proposed_;
  return played_;
}

void CorralStrong::observe(const Observation& obs) {
  const bool off = proposed_ != candidate_;
  if (off) {
    const auto i = static_cast<std::size_t>(side_ - 1);
    cumulative_[i] += obs.loss(played_) / q_[i];
  }
  if (!off || side_ == 2) base_->update(obs, true);
  else base_->update(obs.withheld(proposed_), false);

  const double prev_ts = std::sqrt(c1_ * inv_q_sum_);
  const double prev_lo = c2_ * max_inv_q_;
  if (off) inv_q_sum_ += 1.0 / q_[1];
  max_inv_q_ = std::max(max_inv_q_, 1.0 / q_[1]);
  const double next_ts = std::sqrt(c1_ * inv_q_sum_);
  const double next_lo = c2_ * max_inv_q_;
  CorralTraceRow row{t_, side_, q_[0], q_[1], qbar_[1], eta_, 0.0, next_ts - prev_ts, next_lo - prev_lo, 0.0, 0.0, true};
  row.tsallis_condition = eta_ * std::sqrt(qbar_[1]) * row.bonus_tsallis_step;
  row.barrier_condition = barrier_rate(c2_) * qbar_[1] * row.bonus_barrier_step;
  row.conditions_hold = audit_.check(t_, "tsallis", row.tsallis_condition);
  row.conditions_hold = audit_.check(t_, "log-barrier", row.barrier_condition) && row.conditions_hold;
  bonus_ = next_ts + next_lo;
  row.bonus = bonus_;
  record(row);
}

}  // namespace bobw
