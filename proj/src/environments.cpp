#include "bobw/environments.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace bobw {

double clip_to_range(double x, LossRange r) { return std::clamp(x, range_low(r), range_high(r)); }

namespace {

void check_in_range(double x, LossRange r, const char* what) {
  if (!std::isfinite(x) || x < range_low(r) || x > range_high(r))
    throw std::invalid_argument(std::string(what) + " lies outside the loss range");
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double round_budget_share(double magnitude, double budget, double spent_before) {
  return std::clamp(budget - spent_before, 0.0, magnitude);
}

// Probability of the high outcome of the two-point noise with mean mu.
double high_probability(double mu, LossRange r) { return r == LossRange::ZeroOne ? mu : (1.0 + mu) / 2.0; }

std::vector<double> draw_stochastic(const Stochastic& s, LossRange r, Rng& rng) {
  std::vector<double> out(s.means.size());
  if (s.noise.kind == NoiseKind::Bernoulli) {
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = bernoulli(rng, high_probability(s.means[i], r)) ? range_high(r) : range_low(r);
    return out;
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double mu = s.means[i];
    const double half_width = std::min(range_high(r) - mu, mu - range_low(r));
    double eps = 0.0;
    if (half_width > 0.0 && s.noise.sigma > 0.0) {
      for (int tries = 0; tries < 10000; ++tries) {
        const double z = s.noise.sigma * normal(rng);
        if (std::abs(z) <= half_width) {
          eps = z;
          break;
        }
      }
    }
    out[i] = mu + eps;
  }
  return out;
}

}  // namespace

std::vector<double> CorruptionSchedule::perturbation(std::size_t t, std::size_t best, std::size_t arms) const {
  std::vector<double> c(arms, 0.0);
  if (kind == CorruptionKind::Explicit) {
    if (t >= 1 && t <= explicit_rounds.size()) {
      c = explicit_rounds[t - 1];
      c.resize(arms, 0.0);
    }
    return c;
  }
  double spent_before = 0.0;
  bool active = true;
  if (kind == CorruptionKind::Periodic) {
    const std::size_t p = std::max<std::size_t>(period, 1);
    active = t % p == 0;
    spent_before = static_cast<double>(t / p - (active ? 1 : 0)) * magnitude;
  } else {
    spent_before = static_cast<double>(t - 1) * magnitude;
  }
  const double share = active ? round_budget_share(magnitude, budget, spent_before) : 0.0;
  if (share <= 0.0) return c;
  for (std::size_t i = 0; i < arms; ++i) {
    if (i == best) c[i] = share;
    else if (kind != CorruptionKind::TargetedBest) c[i] = -share;
  }
  return c;
}

double CorruptionSchedule::cost(std::size_t t, std::size_t best, std::size_t arms) const {
  const auto c = perturbation(t, best, arms);
  double worst = 0.0;
  for (double x : c) worst = std::max(worst, std::abs(x));
  return worst;
}

LossModel LossModel::scripted(std::vector<std::vector<double>> rows, LossRange range) {
  if (rows.empty()) throw std::invalid_argument("scripted losses need at least one round");
  const std::size_t n = rows.front().size();
  if (n == 0) throw std::invalid_argument("scripted losses need at least one action");
  for (const auto& row : rows) {
    if (row.size() != n) throw std::invalid_argument("scripted loss rows have inconsistent widths");
    for (double x : row) check_in_range(x, range, "scripted loss");
  }
  return LossModel(Scripted{std::move(rows)}, range);
}

LossModel LossModel::scripted_csv(std::istream& in, LossRange range) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return scripted(std::move(rows), range);
}

LossModel LossModel::alternating(std::size_t arms, std::size_t first_phase, LossRange range) {
  if (arms < 2) throw std::invalid_argument("alternating losses need at least two arms");
  if (first_phase == 0) throw std::invalid_argument("alternating first phase must be positive");
  return LossModel(Alternating{arms, first_phase}, range);
}

LossModel LossModel::stochastic(std::vector<double> means, LossRange range, Noise noise) {
  if (means.empty()) throw std::invalid_argument("stochastic model needs at least one arm");
  for (double m : means) check_in_range(m, range, "mean");
  if (noise.kind == NoiseKind::TruncatedGaussian && !(noise.sigma >= 0.0))
    throw std::invalid_argument("noise sigma must be nonnegative");
  return LossModel(Stochastic{std::move(means), noise}, range);
}

LossModel LossModel::corrupted(std::vector<double> means, LossRange range, CorruptionSchedule schedule, Noise noise) {
  if (noise.kind != NoiseKind::Bernoulli) throw std::invalid_argument("corruption requires two-point noise");
  if (!(schedule.budget >= 0.0)) throw std::invalid_argument("corruption budget must be nonnegative");
  if (!(schedule.magnitude > 0.0) || schedule.magnitude > 2.0)
    throw std::invalid_argument("corruption magnitude must lie in (0, 2]");
  auto base = stochastic(std::move(means), range, noise);
  if (schedule.kind == CorruptionKind::Explicit) {
    double total = 0.0;
    for (const auto& row : schedule.explicit_rounds) {
      double worst = 0.0;
      for (double x : row) worst = std::max(worst, std::abs(x));
      total += worst;
    }
    if (total > schedule.budget + 1e-12) throw std::invalid_argument("explicit corruption exceeds the budget");
  }
  return LossModel(Corrupted{std::get<Stochastic>(base.kind_), std::move(schedule)}, range);
}

LossModel LossModel::contextual(std::vector<std::vector<double>> means, std::vector<std::vector<std::size_t>> policies) {
  if (means.empty() || means.front().empty()) throw std::invalid_argument("contextual model needs contexts and arms");
  const std::size_t arms = means.front().size();
  for (const auto& row : means) {
    if (row.size() != arms) throw std::invalid_argument("contextual means have inconsistent widths");
    for (double m : row) check_in_range(m, LossRange::ZeroOne, "mean");
  }
  if (policies.empty()) throw std::invalid_argument("contextual model needs at least one policy");
  for (const auto& p : policies) {
    if (p.size() != means.size()) throw std::invalid_argument("policy table must map every context");
    for (auto a : p)
      if (a >= arms) throw std::invalid_argument("policy maps to an unknown arm");
  }
  return LossModel(Contextual{std::move(means), std::move(policies)}, LossRange::ZeroOne);
}

LossModel LossModel::linear(const std::vector<std::vector<double>>& actions, const std::vector<double>& theta,
                            double sigma) {
  std::vector<double> means;
  for (const auto& a : actions) {
    if (a.size() != theta.size()) throw std::invalid_argument("action and parameter dimensions differ");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m += a[i] * theta[i];
    means.push_back(m);
  }
  return stochastic(std::move(means), LossRange::MinusOneOne, Noise{NoiseKind::TruncatedGaussian, sigma});
}

std::size_t LossModel::num_actions() const {
  return std::visit(Overloaded{
                        [](const Scripted& s) { return s.rows.front().size(); },
                        [](const Alternating& a) { return a.arms; },
                        [](const Stochastic& s) { return s.means.size(); },
                        [](const Corrupted& c) { return c.base.means.size(); },
                        [](const Contextual& c) { return c.policies.size(); },
                    },
                    kind_);
}

bool LossModel::is_adversarial() const {
  return std::holds_alternative<Scripted>(kind_) || std::holds_alternative<Alternating>(kind_);
}

std::vector<double> LossModel::base_means() const {
  if (const auto* s = std::get_if<Stochastic>(&kind_)) return s->means;
  if (const auto* c = std::get_if<Corrupted>(&kind_)) return c->base.means;
  if (const auto* c = std::get_if<Contextual>(&kind_)) {
    std::vector<double> out(c->policies.size(), 0.0);
    for (std::size_t p = 0; p < out.size(); ++p) {
      for (std::size_t x = 0; x < c->means.size(); ++x) out[p] += c->means[x][c->policies[p][x]];
      out[p] /= static_cast<double>(c->means.size());
    }
    return out;
  }
  throw std::invalid_argument("adversarial models have no means");
}

GapInfo LossModel::gap() const {
  const auto means = base_means();
  if (means.size() < 2) throw std::invalid_argument("gap needs at least two actions");
  std::vector<std::size_t> order(means.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return means[a] < means[b]; });
  const double g = means[order[1]] - means[order[0]];
  if (!(g > 0.0)) throw std::invalid_argument("stochastic model has no unique best action (zero gap)");
  return {g, order[0]};
}

RoundLoss LossModel::next_loss(std::size_t t, Rng& rng) const {
  if (t == 0) throw std::invalid_argument("rounds are 1-based");
  RoundLoss out;
  out.t = t;
  std::visit(Overloaded{
                 [&](const Scripted& s) {
                   if (t > s.rows.size()) throw std::out_of_range("scripted losses exhausted at round " + std::to_string(t));
                   out.values = s.rows[t - 1];
                 },
                 [&](const Alternating& a) {
                   std::size_t phase = 0;
                   std::size_t end = a.first_phase;
                   std::size_t length = a.first_phase;
                   while (t > end) {
                     length *= 2;
                     end += length;
                     ++phase;
                   }
                   out.values.assign(a.arms, range_high(range_));
                   out.values[phase % a.arms] = 0.0;
                 },
                 [&](const Stochastic& s) { out.values = draw_stochastic(s, range_, rng); },
                 [&](const Corrupted& c) {
                   out.values = draw_stochastic(c.base, range_, rng);
                   const auto best = gap().best;
                   const auto shift = c.schedule.perturbation(t, best, out.values.size());
                   for (std::size_t i = 0; i < out.values.size(); ++i)
                     out.values[i] = clip_to_range(out.values[i] + shift[i], range_);
                 },
                 [&](const Contextual& c) {
                   const auto x = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(c.means.size()));
                   out.context = static_cast<int>(x);
                   std::vector<double> arm_loss(c.means[x].size());
                   for (std::size_t a = 0; a < arm_loss.size(); ++a) arm_loss[a] = bernoulli(rng, c.means[x][a]) ? 1.0 : 0.0;
                   out.values.resize(c.policies.size());
                   for (std::size_t p = 0; p < c.policies.size(); ++p) out.values[p] = arm_loss[c.policies[p][x]];
                 },
             },
             kind_);
  return out;
}

std::vector<double> LossModel::expected_loss(const RoundLoss& round) const {
  return std::visit(Overloaded{
                        [&](const Scripted&) { return round.values; },
                        [&](const Alternating&) { return round.values; },
                        [&](const Stochastic& s) { return s.means; },
                        [&](const Corrupted& c) {
                          const auto best = gap().best;
                          const auto shift = c.schedule.perturbation(round.t, best, c.base.means.size());
                          std::vector<double> out(c.base.means.size());
                          for (std::size_t i = 0; i < out.size(); ++i) {
                            const double hi = high_probability(c.base.means[i], range_);
                            out[i] = hi * clip_to_range(range_high(range_) + shift[i], range_) +
                                     (1.0 - hi) * clip_to_range(range_low(range_) + shift[i], range_);
                          }
                          return out;
                        },
                        [&](const Contextual& c) {
                          const auto x = static_cast<std::size_t>(round.context);
                          std::vector<double> out(c.policies.size());
                          for (std::size_t p = 0; p < out.size(); ++p) out[p] = c.means[x][c.policies[p][x]];
                          return out;
                        },
                    },
                    kind_);
}

std::vector<double> LossModel::mean_loss(const RoundLoss& round) const {
  if (const auto* c = std::get_if<Corrupted>(&kind_)) return c->base.means;
  return expected_loss(round);
}

double LossModel::corruption_spent(std::size_t up_to) const {
  const auto* c = std::get_if<Corrupted>(&kind_);
  if (!c) return 0.0;
  const auto best = gap().best;
  const auto arms = c->base.means.size();
  double total = 0.0;
  if (c->schedule.kind == CorruptionKind::Explicit) {
    for (std::size_t t = 1; t <= std::min(up_to, c->schedule.explicit_rounds.size()); ++t)
      total += c->schedule.cost(t, best, arms);
    return total;
  }
  for (std::size_t t = 1; t <= up_to; ++t) {
    const double cost = c->schedule.cost(t, best, arms);
    total += cost;
    if (total >= c->schedule.budget && c->schedule.kind != CorruptionKind::Periodic) break;
  }
  return total;
}

}  // namespace bobw
