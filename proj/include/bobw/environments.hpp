#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bobw/random.hpp"

namespace bobw {

enum class LossRange { ZeroOne, MinusOneOne };

inline double range_low(LossRange r) { return r == LossRange::ZeroOne ? 0.0 : -1.0; }
inline double range_high(LossRange) { return 1.0; }
double clip_to_range(double x, LossRange r);

struct RoundLoss {
  std::size_t t = 0;
  std::vector<double> values;
  int context = -1;
};

enum class NoiseKind { Bernoulli, TruncatedGaussian };

struct Noise {
  NoiseKind kind = NoiseKind::Bernoulli;
  double sigma = 0.0;
};

enum class CorruptionKind { FrontLoaded, Periodic, TargetedBest, Explicit };

// Perturbation vectors c_t with per-round cost max_i |c_{t,i}|, capped by `budget`.
struct CorruptionSchedule {
  CorruptionKind kind = CorruptionKind::FrontLoaded;
  double budget = 0.0;
  double magnitude = 1.0;
  std::size_t period = 1;
  std::vector<std::vector<double>> explicit_rounds;

  std::vector<double> perturbation(std::size_t t, std::size_t best, std::size_t arms) const;
  double cost(std::size_t t, std::size_t best, std::size_t arms) const;
};

struct GapInfo {
  double gap;
  std::size_t best;
};

struct Scripted {
  std::vector<std::vector<double>> rows;
};

// Loss 0 on one arm and 1 elsewhere; the favoured arm rotates at phase boundaries whose
// lengths double, starting from `first_phase`.
struct Alternating {
  std::size_t arms;
  std::size_t first_phase;
};

struct Stochastic {
  std::vector<double> means;
  Noise noise;
};

struct Corrupted {
  Stochastic base;
  CorruptionSchedule schedule;
};

// Uniform contexts; policy p plays arm policies[p][x] in context x.
struct Contextual {
  std::vector<std::vector<double>> means;
  std::vector<std::vector<std::size_t>> policies;
};

class LossModel {
 public:
  using Kind = std::variant<Scripted, Alternating, Stochastic, Corrupted, Contextual>;

  static LossModel scripted(std::vector<std::vector<double>> rows, LossRange range);
  static LossModel scripted_csv(std::istream& in, LossRange range);
  static LossModel alternating(std::size_t arms, std::size_t first_phase, LossRange range);
  static LossModel stochastic(std::vector<double> means, LossRange range, Noise noise = {});
  static LossModel corrupted(std::vector<double> means, LossRange range, CorruptionSchedule schedule,
                             Noise noise = {});
  static LossModel contextual(std::vector<std::vector<double>> means, std::vector<std::vector<std::size_t>> policies);
  // Means <a, theta> for each action vector; truncated Gaussian noise with the given sigma.
  static LossModel linear(const std::vector<std::vector<double>>& actions, const std::vector<double>& theta,
                          double sigma);

  const Kind& kind() const { return kind_; }
  LossRange range() const { return range_; }
  std::size_t num_actions() const;
  bool is_adversarial() const;

  // Realized losses for round t (1-based).
  RoundLoss next_loss(std::size_t t, Rng& rng) const;
  // Conditional expected losses given the round's context; realized values for adversarial kinds.
  std::vector<double> expected_loss(const RoundLoss& round) const;
  // Same, but ignoring any corruption.
  std::vector<double> mean_loss(const RoundLoss& round) const;

  // Unique best action of the uncorrupted means and its gap; throws on ties or adversarial kinds.
  GapInfo gap() const;
  double corruption_spent(std::size_t up_to) const;

 private:
  LossModel(Kind kind, LossRange range) : kind_(std::move(kind)), range_(range) {}
  std::vector<double> base_means() const;
  Kind kind_;
  LossRange range_;
};

}  // namespace bobw
