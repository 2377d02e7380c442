#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bobw/graphs.hpp"
#include "bobw/learner.hpp"

namespace bobw {

class BonusConditionViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class AuditPolicy { Abort, Record };

struct CorralTraceRow {
  std::size_t t = 0;
  int side = 0;  // 1 = candidate, 2 = base
  double q_candidate = 0.0;
  double q_base = 0.0;
  double qbar_base = 0.0;
  double eta = 0.0;
  double bonus = 0.0;
  double bonus_tsallis_step = 0.0;
  double bonus_barrier_step = 0.0;
  double tsallis_condition = 0.0;
  double barrier_condition = 0.0;
  bool conditions_hold = true;
};

std::string trace_csv_header();
std::string trace_csv_row(const CorralTraceRow& row);

// Totals shared across restarts of a corral learner.
struct AuditTally {
  std::size_t checks = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;
};

// Checks the per-round bonus caps; aborts or counts violations.
class BonusAudit {
 public:
  explicit BonusAudit(AuditPolicy policy = AuditPolicy::Abort, std::shared_ptr<AuditTally> tally = nullptr)
      : policy_(policy), tally_(std::move(tally)) {}
  bool check(std::size_t t, const char* condition, double value, double cap = 0.25);
  std::size_t checks() const { return checks_; }
  std::size_t violations() const { return violations_; }
  double worst_ratio() const { return worst_; }

 private:
  AuditPolicy policy_;
  std::shared_ptr<AuditTally> tally_;
  std::size_t checks_ = 0;
  std::size_t violations_ = 0;
  double worst_ = 0.0;
};

struct CorralOptions {
  AuditPolicy audit = AuditPolicy::Abort;
  bool keep_trace = false;
  // Strongly observable graph whose loopless arms need the recentered surrogate loss.
  std::optional<FeedbackGraph> surrogate_graph;
  std::shared_ptr<AuditTally> tally;
};

// Two-sided FTRL state shared by the variants.
class CorralBase : public Learner {
 public:
  CorralBase(std::size_t candidate, std::unique_ptr<IwLearner> base, CorralOptions options);
  std::size_t num_actions() const override { return base_->num_actions(); }
  std::optional<std::size_t> candidate() const override { return candidate_; }
  std::vector<double> action_distribution() const override;

  const BonusAudit& audit() const { return audit_; }
  const std::vector<CorralTraceRow>& trace() const { return trace_; }
  double bonus() const { return bonus_; }
  std::array<double, 2> sampling() const { return q_; }
  std::array<double, 2> ftrl_point() const { return qbar_; }
  const std::array<double, 2>& cumulative() const { return cumulative_; }
  IwLearner& base() { return *base_; }

 protected:
  void solve(const Regularizer& reg, double scale, std::span<const double> extra = {});
  void record(CorralTraceRow row);

  std::size_t candidate_;
  std::unique_ptr<IwLearner> base_;
  CorralOptions options_;
  BonusAudit audit_;
  std::vector<CorralTraceRow> trace_;
  std::array<double, 2> cumulative_{0.0, 0.0};
  double bonus_ = 0.0;
  std::array<double, 2> qbar_{0.5, 0.5};
  std::array<double, 2> q_{0.5, 0.5};
  std::size_t t_ = 0;
  int side_ = 1;
  std::size_t proposed_ = 0;
  std::size_t played_ = 0;
  int context_ = -1;
};

// Hybrid-regularized corral for iw-1/2 stable bases.
class CorralHalf final : public CorralBase {
 public:
  CorralHalf(std::size_t candidate, std::unique_ptr<IwLearner> base, CorralOptions options = {});
  std::string name() const override { return "corral-1/2(" + base_->name() + ")"; }
  std::size_t act(std::size_t t, int context, Rng& rng) override;
  void observe(const Observation& obs) override;
  SelfBoundingMeta meta() const override;

  static double learning_rate(std::size_t t, double c1);
  static double bonus_for(double c1, double c2, std::span<const double> q_base_history);
  static std::array<double, 2> mix(const std::array<double, 2>& qbar, std::size_t t);
  static std::array<double, 2> loss_estimate(int side, double loss, const std::array<double, 2>& q);

 private:
  double c1_;
  double c2_;
  double eta_ = 0.0;
  double inv_q_sum_ = 0.0;
  double min_q_ = 1.0;
};

// Corral for iw-2/3 stable bases on weakly observable graphs.
class CorralTwoThirds final : public CorralBase {
 public:
  CorralTwoThirds(std::size_t candidate, std::unique_ptr<IwLearner> base, FeedbackGraph graph,
                  CorralOptions options = {});
  std::string name() const override { return "corral-2/3(" + base_->name() + ")"; }
  std::size_t act(std::size_t t, int context, Rng& rng) override;
  void observe(const Observation& obs) override;
  SelfBoundingMeta meta() const override;
  std::vector<double> action_distribution() const override;

  double exploration() const { return gamma_; }

  static double learning_rate(std::size_t t, double c1);
  static double gamma_for(double eta, double q_base);
  // Solves gamma = gamma_for(eta, (1 - gamma) * qbar_base).
  static double solve_gamma(double eta, double qbar_base);
  static std::array<double, 2> loss_estimate(int side, bool reveal, double loss, double gamma,
                                             const std::array<double, 2>& qbar);
  std::size_t revealing_action(std::size_t target) const;

 private:
  FeedbackGraph graph_;
  double c1_;
  double c2_;
  double eta_ = 0.0;
  double gamma_ = 0.0;
  bool reveal_ = false;
  std::size_t target_ = 0;
  double inv_sqrt_q_sum_ = 0.0;
  double min_q_ = 1.0;
};

enum class DataDependence { FirstOrder, SecondOrder };

// Log-barrier corral with optimistic predictions for data-dependent bases.
class CorralDataDependent final : public CorralBase {
 public:
  using Predictor = std::function<std::vector<double>(std::size_t t)>;

  CorralDataDependent(std::size_t candidate, std::unique_ptr<IwLearner> base, std::size_t horizon,
                      DataDependence order, Predictor predictor = {}, CorralOptions options = {});
  std::string name() const override { return "corral-dd(" + base_->name() + ")"; }
  std::size_t act(std::size_t t, int context, Rng& rng) override;
  void observe(const Observation& obs) override;
  SelfBoundingMeta meta() const override;

  static double learning_rate(double variation, double c1, double c2, double horizon);
  static std::array<double, 2> loss_estimate(int side, double loss, const std::array<double, 2>& prediction,
                                             const std::array<double, 2>& q);

 private:
  double c1_;
  double c2_;
  double horizon_;
  DataDependence order_;
  Predictor predictor_;
  double eta_ = 0.0;
  double variation_ = 0.0;
  double weighted_sum_ = 0.0;
  double min_q_ = 1.0;
  std::array<double, 2> prediction_{0.0, 0.0};
  std::vector<double> round_prediction_;
};

// Corral for strongly iw-stable bases that may themselves propose the candidate.
class CorralStrong final : public CorralBase {
 public:
  CorralStrong(std::size_t candidate, std::unique_ptr<IwLearner> base, CorralOptions options = {});
  std::string name() const override { return "corral-strong(" + base_->name() + ")"; }
  std::size_t act(std::size_t t, int context, Rng& rng) override;
  void observe(const Observation& obs) override;
  SelfBoundingMeta meta() const override;

  static double learning_rate(std::size_t off_candidate_count, double c1);

 private:
  double c1_;
  double c2_;
  double eta_ = 0.0;
  std::size_t off_candidate_ = 0;
  double inv_q_sum_ = 0.0;
  double max_inv_q_ = 0.0;
};

}  // namespace bobw
