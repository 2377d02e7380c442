#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "bobw/random.hpp"

namespace bobw {

inline constexpr double kSimplexTolerance = 1e-9;

class Distribution {
 public:
  Distribution() = default;
  explicit Distribution(std::vector<double> weights);

  static Distribution uniform(std::size_t n);
  static Distribution point_mass(std::size_t n, std::size_t index);

  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }
  const std::vector<double>& vector() const { return weights_; }

 private:
  std::vector<double> weights_;
};

std::size_t sample(const Distribution& dist, Rng& rng);
std::size_t sample_weights(std::span<const double> weights, Rng& rng);

// psi(p) = sum p ln p
struct NegEntropy {};
// psi(p) = -sum p^a / (a (1 - a))
struct Tsallis {
  double exponent;
};
// psi(p) = sum ln(1/p)
struct LogBarrier {};
// psi(p) = tsallis_weight * (-1/(1-a)) sum p^a + barrier_weight * sum ln(1/p)
struct Hybrid {
  double exponent;
  double tsallis_weight;
  double barrier_weight;
};

class Regularizer {
 public:
  using Kind = std::variant<NegEntropy, Tsallis, LogBarrier, Hybrid>;

  static Regularizer neg_entropy();
  static Regularizer tsallis(double exponent);
  static Regularizer log_barrier();
  static Regularizer hybrid(double exponent, double tsallis_weight, double barrier_weight);

  const Kind& kind() const { return kind_; }
  bool is_neg_entropy() const { return std::holds_alternative<NegEntropy>(kind_); }
  bool is_tsallis() const { return std::holds_alternative<Tsallis>(kind_); }
  bool is_log_barrier() const { return std::holds_alternative<LogBarrier>(kind_); }
  bool is_hybrid() const { return std::holds_alternative<Hybrid>(kind_); }
  std::string name() const;

  // Per-coordinate value and derivative; psi is separable.
  double value(double x) const;
  double derivative(double x) const;
  double value(std::span<const double> p) const;

 private:
  explicit Regularizer(Kind kind) : kind_(kind) {}
  Kind kind_;
};

// Effective loss = totals - bonus + prediction (bonus/prediction optional).
struct CumulativeLoss {
  std::vector<double> totals;
  std::vector<double> bonus;
  std::vector<double> prediction;

  explicit CumulativeLoss(std::size_t n = 0) : totals(n, 0.0) {}
  std::size_t size() const { return totals.size(); }
  std::vector<double> effective() const;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct FtrlSolution {
  Distribution dist;
  double multiplier = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
};

// argmin_{p in simplex, p >= floor} <p, L> + psi(p) / scale.
FtrlSolution ftrl_solve(std::span<const double> cumulative, const Regularizer& reg, double scale,
                        double floor = 0.0);
Distribution ftrl_argmin(std::span<const double> cumulative, const Regularizer& reg, double scale,
                         double floor = 0.0);
Distribution ftrl_argmin(const CumulativeLoss& cumulative, const Regularizer& reg, double scale,
                         double floor = 0.0);

// Largest |g_i - mean g| over coordinates strictly above the floor, g = L + psi'(p)/scale.
double kkt_residual(std::span<const double> cumulative, const Regularizer& reg, double scale,
                    std::span<const double> p, double floor = 0.0);

double bregman(const Regularizer& reg, std::span<const double> p, std::span<const double> q);

struct StabilityBound {
  double lhs;
  double rhs;
  std::string lemma;
};

// lhs = max_{x >= 0} <p - x, loss> - D(x, p) / scale, evaluated coordinate-wise;
// rhs = the closed-form lemma bound. Throws when the lemma's precondition fails.
StabilityBound stability_bound(const Regularizer& reg, std::span<const double> p,
                               std::span<const double> loss, double scale);

}  // namespace bobw
