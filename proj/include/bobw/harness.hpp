#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "bobw/corral.hpp"
#include "bobw/environments.hpp"
#include "bobw/epoch.hpp"
#include "bobw/feedback.hpp"
#include "bobw/graphs.hpp"
#include "bobw/learner.hpp"

namespace bobw {

enum class Setting { Mab, Linear, Contextual, GraphStrong, GraphWeak };
enum class Stack { BaseOnly, BaseCorral, Full };
enum class Regime { Stochastic, Corrupted, Alternating, Scripted };
enum class CorralChoice { Default, DataDependentFirst, DataDependentSecond };

std::string to_string(Setting s);
std::string to_string(Stack s);
std::string to_string(Regime r);
std::string to_string(CorralChoice c);

struct ExperimentConfig {
  Setting setting = Setting::Mab;
  Stack stack = Stack::Full;
  CorralChoice corral = CorralChoice::Default;
  Regime regime = Regime::Stochastic;

  std::size_t arms = 4;
  double gap = 0.25;
  std::vector<double> means;
  std::optional<std::size_t> best_arm;

  CorruptionKind corruption = CorruptionKind::FrontLoaded;
  double corruption_budget = 0.0;
  double corruption_magnitude = 1.0;
  std::size_t corruption_period = 1;
  // Pseudo-regret on the uncorrupted means (true) or on the corrupted expected losses (false).
  bool regret_on_clean_means = true;

  std::size_t alternating_phase = 16;
  std::string script_file;

  std::size_t dim = 2;
  std::vector<std::vector<double>> actions;
  std::vector<double> theta;
  double noise_sigma = 0.1;

  std::size_t contexts = 2;
  std::vector<std::vector<std::size_t>> policies;
  std::vector<std::vector<double>> context_means;

  std::string graph_file;
  std::vector<std::pair<std::size_t, std::size_t>> graph_edges;

  std::size_t horizon = 1024;
  std::vector<std::uint64_t> seeds{1};
  AuditPolicy audit = AuditPolicy::Abort;

  std::string output;
  std::string summary_output;
  std::string switch_output;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
// Relative graph and script paths are resolved against the config file's directory.
ExperimentConfig load_config(const std::string& path);

// Everything a run needs that is derived from the config once.
struct Setup {
  LossModel model;
  FeedbackModel feedback;
  std::optional<FeedbackGraph> graph;
  ActionSet action_vectors;
  std::vector<std::vector<std::size_t>> policies;
  std::size_t num_actions = 0;
};

// Validates the config and builds the model; throws std::invalid_argument before any simulation.
Setup prepare_setup(const ExperimentConfig& config);

std::unique_ptr<IwLearner> make_base(const ExperimentConfig& config, const Setup& setup,
                                     std::optional<std::size_t> excluded);
std::unique_ptr<Learner> make_corral(const ExperimentConfig& config, const Setup& setup, std::size_t candidate,
                                     std::shared_ptr<AuditTally> tally);
std::unique_ptr<Learner> make_learner(const ExperimentConfig& config, const Setup& setup, std::uint64_t seed,
                                      std::shared_ptr<AuditTally> tally);

std::vector<std::size_t> checkpoints(std::size_t horizon);

struct RegretRecord {
  std::size_t t = 0;
  double pseudo_regret = 0.0;
  double one_minus_p_best = 0.0;
  std::optional<std::size_t> candidate;
};

struct SeedRun {
  std::uint64_t seed = 0;
  std::vector<RegretRecord> records;
  std::size_t best_action = 0;
  std::optional<std::size_t> final_candidate;
  std::vector<EpochSwitch> switches;
  AuditTally audit;
};

struct SummaryRow {
  std::size_t t = 0;
  double mean = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double min = 0.0;
  double max = 0.0;
  double mean_one_minus_p_best = 0.0;
};

struct RunResult {
  std::vector<SeedRun> runs;
  std::vector<SummaryRow> summary;
  AuditTally audit;
};

SeedRun run_seed(const ExperimentConfig& config, const Setup& setup, std::uint64_t seed);
// Runs all seeds on a worker pool capped by BOBW_THREADS and writes the configured outputs.
RunResult run_experiment(const ExperimentConfig& config);

struct IwRunPoint {
  std::size_t t = 0;
  double pseudo_regret = 0.0;
  double inv_q_sum = 0.0;
  double inv_sqrt_q_sum = 0.0;
  double min_q = 1.0;
};

// Runs a base learner alone with a fixed sequence of update probabilities q[t-1]; regret is measured
// on the model's means against the best of the learner's own arms.
std::vector<IwRunPoint> run_iw_base(IwLearner& base, const LossModel& model, const FeedbackModel& feedback,
                                    const std::vector<double>& q, std::uint64_t seed);

std::vector<SummaryRow> summarize(const std::vector<SeedRun>& runs);

void write_records_csv(std::ostream& out, const ExperimentConfig& config, const std::vector<SeedRun>& runs);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary);
void write_switches_csv(std::ostream& out, const std::vector<SeedRun>& runs);
std::string format_number(double x);

// Cumulative sum of expected[t][played[t]] - expected[t][x*], x* the best fixed action overall.
std::vector<double> pseudo_regret(const std::vector<std::size_t>& played,
                                  const std::vector<std::vector<double>>& expected);

struct SlopeFit {
  double log_coefficient = 0.0;
  double log_r2 = 0.0;
  double sqrt_coefficient = 0.0;
  double sqrt_r2 = 0.0;
  std::size_t points = 0;
};

// Least squares of regret on ln t and on sqrt t (each with intercept) over the tail half.
SlopeFit slope_fit(const std::vector<std::pair<double, double>>& curve);

struct Verdict {
  SlopeFit fit;
  double ratio_at_end = 0.0;    // regret(T) / sqrt(T)
  double ratio_earlier = 0.0;   // regret(T/16) / sqrt(T/16)
  bool passes = false;
};

Verdict stochastic_verdict(const std::vector<std::pair<double, double>>& curve);

std::vector<std::pair<double, double>> mean_curve(const std::vector<SummaryRow>& summary);

// Reads a records CSV back into per-seed curves keyed by seed.
std::vector<std::pair<std::uint64_t, std::vector<std::pair<double, double>>>> read_records_csv(std::istream& in);

}  // namespace bobw
