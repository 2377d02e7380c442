#include "bobw/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace bobw {

namespace {

template <class E>
E parse_enum(const std::string& text, const std::vector<std::pair<const char*, E>>& table, const char* what) {
  for (const auto& [name, value] : table)
    if (text == name) return value;
  throw std::invalid_argument(std::string("unknown ") + what + ": " + text);
}

template <class E>
std::string enum_name(E value, const std::vector<std::pair<const char*, E>>& table) {
  for (const auto& [name, v] : table)
    if (v == value) return name;
  return "?";
}

const std::vector<std::pair<const char*, Setting>> kSettings{{"mab", Setting::Mab},
                                                             {"linear", Setting::Linear},
                                                             {"contextual", Setting::Contextual},
                                                             {"graph-strong", Setting::GraphStrong},
                                                             {"graph-weak", Setting::GraphWeak}};
const std::vector<std::pair<const char*, Stack>> kStacks{
    {"base-only", Stack::BaseOnly}, {"base+corral", Stack::BaseCorral}, {"full", Stack::Full}};
const std::vector<std::pair<const char*, Regime>> kRegimes{{"stochastic", Regime::Stochastic},
                                                           {"corrupted", Regime::Corrupted},
                                                           {"alternating", Regime::Alternating},
                                                           {"scripted", Regime::Scripted}};
const std::vector<std::pair<const char*, CorralChoice>> kCorrals{{"default", CorralChoice::Default},
                                                                 {"dd-first", CorralChoice::DataDependentFirst},
                                                                 {"dd-second", CorralChoice::DataDependentSecond}};
const std::vector<std::pair<const char*, CorruptionKind>> kCorruptions{{"front-loaded", CorruptionKind::FrontLoaded},
                                                                       {"periodic", CorruptionKind::Periodic},
                                                                       {"targeted-best", CorruptionKind::TargetedBest}};
const std::vector<std::pair<const char*, AuditPolicy>> kAudits{{"abort", AuditPolicy::Abort},
                                                               {"record", AuditPolicy::Record}};

template <class T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::size_t default_best(const ExperimentConfig& c, std::size_t n) {
  if (c.best_arm) {
    if (*c.best_arm >= n) throw std::invalid_argument("best_arm out of range");
    return *c.best_arm;
  }
  return n - 1;
}

std::vector<double> gap_means(const ExperimentConfig& c, std::size_t n) {
  if (!c.means.empty()) {
    if (c.means.size() != n) throw std::invalid_argument("means must have one entry per action");
    return c.means;
  }
  if (!(c.gap >= 0.0 && c.gap <= 0.5)) throw std::invalid_argument("gap must lie in [0, 1/2]");
  std::vector<double> means(n, 0.5);
  means[default_best(c, n)] = 0.5 - c.gap;
  return means;
}

FeedbackGraph default_strong_graph() {
  FeedbackGraph g(5);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) g.add_edge(i, j);
  g.add_edge(3, 3);
  for (std::size_t i = 0; i < 4; ++i) g.add_edge(i, 4);
  g.add_edge(4, 3);
  return g;
}

FeedbackGraph default_weak_graph() {
  FeedbackGraph g(4);
  for (std::size_t j = 0; j < 4; ++j) g.add_edge(0, j);
  return g;
}

std::vector<std::vector<double>> linear_actions(const ExperimentConfig& c) {
  if (!c.actions.empty()) return c.actions;
  if (c.dim != 2) throw std::invalid_argument("default linear actions need dim = 2");
  std::vector<std::vector<double>> actions;
  for (std::size_t k = 0; k < c.arms; ++k) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(c.arms);
    actions.push_back({std::cos(a), std::sin(a)});
  }
  return actions;
}

FeedbackGraph config_graph(const ExperimentConfig& c) {
  if (!c.graph_file.empty()) return read_edge_list_file(c.graph_file);
  if (!c.graph_edges.empty()) return FeedbackGraph::from_edges(c.arms, c.graph_edges);
  return c.setting == Setting::GraphStrong ? default_strong_graph() : default_weak_graph();
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::size_t worker_count(std::size_t jobs) {
  std::size_t n = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BOBW_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) n = std::min<std::size_t>(n, static_cast<std::size_t>(v));
  }
  return std::max<std::size_t>(1, std::min(n, jobs));
}

}  // namespace

std::string to_string(Setting s) { return enum_name(s, kSettings); }
std::string to_string(Stack s) { return enum_name(s, kStacks); }
std::string to_string(Regime r) { return enum_name(r, kRegimes); }
std::string to_string(CorralChoice c) { return enum_name(c, kCorrals); }

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  if (j.contains("setting")) c.setting = parse_enum(j.at("setting").get<std::string>(), kSettings, "setting");
  if (j.contains("stack")) c.stack = parse_enum(j.at("stack").get<std::string>(), kStacks, "stack");
  if (j.contains("corral")) c.corral = parse_enum(j.at("corral").get<std::string>(), kCorrals, "corral");
  if (j.contains("regime")) c.regime = parse_enum(j.at("regime").get<std::string>(), kRegimes, "regime");
  read_opt(j, "arms", c.arms);
  read_opt(j, "gap", c.gap);
  read_opt(j, "means", c.means);
  if (j.contains("best_arm")) c.best_arm = j.at("best_arm").get<std::size_t>();
  if (j.contains("corruption")) {
    const auto& k = j.at("corruption");
    if (k.contains("kind")) c.corruption = parse_enum(k.at("kind").get<std::string>(), kCorruptions, "corruption");
    read_opt(k, "budget", c.corruption_budget);
    read_opt(k, "magnitude", c.corruption_magnitude);
    read_opt(k, "period", c.corruption_period);
    read_opt(k, "regret_on_clean_means", c.regret_on_clean_means);
  }
  read_opt(j, "alternating_phase", c.alternating_phase);
  read_opt(j, "script_file", c.script_file);
  read_opt(j, "dim", c.dim);
  read_opt(j, "actions", c.actions);
  read_opt(j, "theta", c.theta);
  read_opt(j, "noise_sigma", c.noise_sigma);
  read_opt(j, "contexts", c.contexts);
  read_opt(j, "policies", c.policies);
  read_opt(j, "context_means", c.context_means);
  read_opt(j, "graph_file", c.graph_file);
  read_opt(j, "graph_edges", c.graph_edges);
  read_opt(j, "horizon", c.horizon);
  if (j.contains("seeds")) {
    const auto& s = j.at("seeds");
    if (s.is_array()) {
      c.seeds = s.get<std::vector<std::uint64_t>>();
    } else {
      const auto count = s.at("count").get<std::size_t>();
      const auto first = s.value("first", std::uint64_t{1});
      c.seeds.clear();
      for (std::size_t i = 0; i < count; ++i) c.seeds.push_back(first + i);
    }
  }
  if (j.contains("audit")) c.audit = parse_enum(j.at("audit").get<std::string>(), kAudits, "audit policy");
  read_opt(j, "output", c.output);
  read_opt(j, "summary_output", c.summary_output);
  read_opt(j, "switch_output", c.switch_output);
  return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["setting"] = to_string(c.setting);
  j["stack"] = to_string(c.stack);
  j["corral"] = to_string(c.corral);
  j["regime"] = to_string(c.regime);
  j["arms"] = c.arms;
  j["gap"] = c.gap;
  j["means"] = c.means;
  if (c.best_arm) j["best_arm"] = *c.best_arm;
  j["corruption"] = {{"kind", enum_name(c.corruption, kCorruptions)},
                     {"budget", c.corruption_budget},
                     {"magnitude", c.corruption_magnitude},
                     {"period", c.corruption_period},
                     {"regret_on_clean_means", c.regret_on_clean_means}};
  j["alternating_phase"] = c.alternating_phase;
  j["script_file"] = c.script_file;
  j["dim"] = c.dim;
  j["actions"] = c.actions;
  j["theta"] = c.theta;
  j["noise_sigma"] = c.noise_sigma;
  j["contexts"] = c.contexts;
  j["policies"] = c.policies;
  j["context_means"] = c.context_means;
  j["graph_file"] = c.graph_file;
  j["graph_edges"] = c.graph_edges;
  j["horizon"] = c.horizon;
  j["seeds"] = c.seeds;
  j["audit"] = enum_name(c.audit, kAudits);
  j["output"] = c.output;
  j["summary_output"] = c.summary_output;
  j["switch_output"] = c.switch_output;
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path);
  auto c = config_from_json(nlohmann::json::parse(in));
  const auto dir = std::filesystem::path(path).parent_path();
  for (auto* file : {&c.graph_file, &c.script_file})
    if (!file->empty() && std::filesystem::path(*file).is_relative()) *file = (dir / *file).string();
  return c;
}

Setup prepare_setup(const ExperimentConfig& c) {
  if (c.horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (c.seeds.empty()) throw std::invalid_argument("seed list must be nonempty");
  if (c.corral != CorralChoice::Default && (c.setting != Setting::Mab || c.stack == Stack::BaseOnly))
    throw std::invalid_argument("data-dependent corral is only available for the mab setting with a corral stack");
  const bool adversarial = c.regime == Regime::Alternating || c.regime == Regime::Scripted;
  if ((c.setting == Setting::Linear || c.setting == Setting::Contextual) && c.regime != Regime::Stochastic)
    throw std::invalid_argument(to_string(c.setting) + " setting supports only the stochastic regime");
  if (c.corruption_budget != 0.0 && c.regime != Regime::Corrupted)
    throw std::invalid_argument("a corruption budget needs the corrupted regime");

  std::optional<FeedbackGraph> graph;
  if (c.setting == Setting::GraphStrong || c.setting == Setting::GraphWeak) {
    graph = config_graph(c);
    const auto kind = classify(*graph);
    if (c.setting == Setting::GraphStrong && kind != Observability::Strong)
      throw std::invalid_argument("graph-strong setting needs a strongly observable graph");
    if (c.setting == Setting::GraphWeak && kind != Observability::Weak)
      throw std::invalid_argument("graph-weak setting needs a weakly observable graph");
  }

  auto build_model = [&]() -> LossModel {
    switch (c.setting) {
      case Setting::Linear: {
        const auto actions = linear_actions(c);
        auto theta = c.theta;
        if (theta.empty()) theta = {-2.0 * c.gap, -c.gap};
        return LossModel::linear(actions, theta, c.noise_sigma);
      }
      case Setting::Contextual: {
        auto means = c.context_means;
        if (means.empty()) {
          means.assign(c.contexts, std::vector<double>(c.arms, 0.5));
          for (std::size_t x = 0; x < c.contexts; ++x) means[x][x % c.arms] = 0.5 - c.gap;
        }
        auto policies = c.policies;
        if (policies.empty()) {
          const std::size_t arms = means.front().size();
          std::size_t count = 1;
          for (std::size_t x = 0; x < means.size(); ++x) {
            count *= arms;
            if (count > 4096) throw std::invalid_argument("too many default policies; list them explicitly");
          }
          for (std::size_t p = 0; p < count; ++p) {
            std::vector<std::size_t> row(means.size());
            std::size_t code = p;
            for (auto& a : row) {
              a = code % arms;
              code /= arms;
            }
            policies.push_back(row);
          }
        }
        return LossModel::contextual(means, policies);
      }
      default:
        break;
    }
    const std::size_t n = graph ? graph->size() : c.arms;
    switch (c.regime) {
      case Regime::Alternating:
        return LossModel::alternating(n, c.alternating_phase, LossRange::ZeroOne);
      case Regime::Scripted: {
        std::ifstream in(c.script_file);
        if (!in) throw std::invalid_argument("cannot open loss script " + c.script_file);
        auto m = LossModel::scripted_csv(in, LossRange::ZeroOne);
        if (m.num_actions() != n) throw std::invalid_argument("loss script width does not match the action count");
        return m;
      }
      case Regime::Corrupted: {
        CorruptionSchedule s;
        s.kind = c.corruption;
        s.budget = c.corruption_budget;
        s.magnitude = c.corruption_magnitude;
        s.period = c.corruption_period;
        return LossModel::corrupted(gap_means(c, n), LossRange::ZeroOne, s);
      }
      case Regime::Stochastic:
        return LossModel::stochastic(gap_means(c, n), LossRange::ZeroOne);
    }
    throw std::logic_error("unhandled regime");
  };

  Setup setup{build_model(), graph ? FeedbackModel::graph(*graph) : FeedbackModel::bandit(), graph, {}, {}, 0};
  setup.num_actions = setup.model.num_actions();
  if (setup.num_actions < 2) throw std::invalid_argument("need at least two actions");
  if (!adversarial) setup.model.gap();
  if (c.setting == Setting::Linear) {
    for (const auto& a : linear_actions(c)) setup.action_vectors.push_back(Eigen::Map<const Eigen::VectorXd>(a.data(), a.size()));
  }
  if (c.setting == Setting::Contextual) setup.policies = std::get<Contextual>(setup.model.kind()).policies;
  return setup;
}

std::unique_ptr<IwLearner> make_base(const ExperimentConfig& c, const Setup& s, std::optional<std::size_t> excluded) {
  switch (c.setting) {
    case Setting::Mab: {
      const auto cls = c.corral == CorralChoice::Default ? StabilityClass::StrongHalf : StabilityClass::DataDependentHalf;
      return std::make_unique<LogBarrierMab>(s.num_actions, excluded, c.horizon, cls);
    }
    case Setting::Linear:
      return std::make_unique<Exp2>(s.action_vectors, excluded);
    case Setting::Contextual: {
      const auto& ctx = std::get<Contextual>(s.model.kind());
      return std::make_unique<Exp4>(s.policies, ctx.means.front().size(), excluded);
    }
    case Setting::GraphStrong:
      return std::make_unique<TsallisGraph>(*s.graph, excluded);
    case Setting::GraphWeak:
      return std::make_unique<WeakExp3>(*s.graph, excluded);
  }
  throw std::logic_error("unhandled setting");
}

std::unique_ptr<Learner> make_corral(const ExperimentConfig& c, const Setup& s, std::size_t candidate,
                                     std::shared_ptr<AuditTally> tally) {
  CorralOptions opts;
  opts.audit = c.audit;
  opts.tally = std::move(tally);
  switch (c.setting) {
    case Setting::Mab:
      if (c.corral == CorralChoice::Default)
        return std::make_unique<CorralStrong>(candidate, make_base(c, s, std::nullopt), opts);
      {
        CorralDataDependent::Predictor predictor;
        if (c.corral == CorralChoice::DataDependentSecond && !c.means.empty()) {
          auto means = c.means;
          predictor = [means](std::size_t) { return means; };
        }
        const auto order =
            c.corral == CorralChoice::DataDependentFirst ? DataDependence::FirstOrder : DataDependence::SecondOrder;
        return std::make_unique<CorralDataDependent>(candidate, make_base(c, s, candidate), c.horizon, order,
                                                     predictor, opts);
      }
    case Setting::Linear:
    case Setting::Contextual:
      return std::make_unique<CorralHalf>(candidate, make_base(c, s, candidate), opts);
    case Setting::GraphStrong: {
      bool loopless = false;
      for (std::size_t i = 0; i < s.graph->size(); ++i) loopless = loopless || !s.graph->has_self_loop(i);
      if (loopless) opts.surrogate_graph = *s.graph;
      return std::make_unique<CorralHalf>(candidate, make_base(c, s, candidate), opts);
    }
    case Setting::GraphWeak:
      return std::make_unique<CorralTwoThirds>(candidate, make_base(c, s, candidate), *s.graph, opts);
  }
  throw std::logic_error("unhandled setting");
}

std::unique_ptr<Learner> make_learner(const ExperimentConfig& c, const Setup& s, std::uint64_t seed,
                                      std::shared_ptr<AuditTally> tally) {
  switch (c.stack) {
    case Stack::BaseOnly:
      return std::make_unique<BaseOnly>(make_base(c, s, std::nullopt));
    case Stack::BaseCorral: {
      Rng pick = derive_rng(seed, {3});
      const auto candidate = static_cast<std::size_t>(uniform01(pick) * static_cast<double>(s.num_actions));
      return make_corral(c, s, candidate, std::move(tally));
    }
    case Stack::Full: {
      LearnerFactory factory = [&c, &s, tally](std::size_t candidate) { return make_corral(c, s, candidate, tally); };
      return std::make_unique<EpochReduction>(factory, s.num_actions, c.horizon, mix_seed(seed ^ 0x45504f4348ULL));
    }
  }
  throw std::logic_error("unhandled stack");
}

std::vector<std::size_t> checkpoints(std::size_t horizon) {
  std::vector<std::size_t> out;
  for (std::size_t t = 16; t <= horizon; t *= 2) out.push_back(t);
  if (out.empty() || out.back() != horizon) out.push_back(horizon);
  return out;
}

SeedRun run_seed(const ExperimentConfig& c, const Setup& s, std::uint64_t seed) {
  auto tally = std::make_shared<AuditTally>();
  auto learner = make_learner(c, s, seed, tally);
  Rng env = derive_rng(seed, {1});
  Rng rng = derive_rng(seed, {2});
  const auto grid = checkpoints(c.horizon);
  const std::size_t n = s.num_actions;

  struct Snapshot {
    double learner = 0.0;
    std::vector<double> actions;
    std::vector<double> miss;
    std::optional<std::size_t> candidate;
  };
  std::vector<Snapshot> snaps;
  snaps.reserve(grid.size());
  double learner_sum = 0.0;
  std::vector<double> action_sum(n, 0.0);
  std::vector<double> miss(n, 0.0);
  std::size_t next = 0;

  for (std::size_t t = 1; t <= c.horizon; ++t) {
    const RoundLoss round = s.model.next_loss(t, env);
    const std::size_t played = learner->act(t, round.context, rng);
    const auto dist = learner->action_distribution();
    const auto mean = c.regret_on_clean_means ? s.model.mean_loss(round) : s.model.expected_loss(round);
    learner_sum += mean[played];
    for (std::size_t i = 0; i < n; ++i) {
      action_sum[i] += mean[i];
      miss[i] += 1.0 - dist[i];
    }
    learner->observe(s.feedback.observe(round, played));
    if (next < grid.size() && grid[next] == t) {
      snaps.push_back(Snapshot{learner_sum, action_sum, miss, learner->candidate()});
      ++next;
    }
  }

  SeedRun run;
  run.seed = seed;
  run.best_action = static_cast<std::size_t>(std::min_element(action_sum.begin(), action_sum.end()) - action_sum.begin());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto& snap = snaps[k];
    run.records.push_back(RegretRecord{grid[k], snap.learner - snap.actions[run.best_action],
                                       snap.miss[run.best_action], snap.candidate});
  }
  run.final_candidate = learner->candidate();
  if (auto* epoch = dynamic_cast<EpochReduction*>(learner.get())) run.switches = epoch->switches();
  run.audit = *tally;
  return run;
}

std::vector<IwRunPoint> run_iw_base(IwLearner& base, const LossModel& model, const FeedbackModel& feedback,
                                    const std::vector<double>& q, std::uint64_t seed) {
  Rng env = derive_rng(seed, {1});
  Rng rng = derive_rng(seed, {2});
  const std::size_t horizon = q.size();
  const auto grid = checkpoints(horizon);
  const auto& arms = base.arms();
  double learner_sum = 0.0;
  std::vector<double> action_sum(arms.size(), 0.0);
  IwRunPoint running;
  std::vector<IwRunPoint> snaps;
  std::vector<std::vector<double>> arm_snaps;
  std::size_t next = 0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    const RoundLoss round = model.next_loss(t, env);
    const IwRound iw{q[t - 1], std::nullopt, round.context};
    base.prepare(iw);
    const std::size_t played = base.sample(rng);
    const bool updated = bernoulli(rng, iw.q);
    const auto mean = model.mean_loss(round);
    learner_sum += mean[played];
    for (std::size_t i = 0; i < arms.size(); ++i) action_sum[i] += mean[arms[i]];
    running.inv_q_sum += 1.0 / iw.q;
    running.inv_sqrt_q_sum += 1.0 / std::sqrt(iw.q);
    running.min_q = std::min(running.min_q, iw.q);
    const Observation obs = feedback.observe(round, played);
    if (updated) base.update(obs, true);
    else base.update(obs.withheld(played), false);
    if (next < grid.size() && grid[next] == t) {
      running.t = t;
      running.pseudo_regret = learner_sum;
      snaps.push_back(running);
      arm_snaps.push_back(action_sum);
      ++next;
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(action_sum.begin(), action_sum.end()) - action_sum.begin());
  for (std::size_t k = 0; k < snaps.size(); ++k) snaps[k].pseudo_regret -= arm_snaps[k][best];
  return snaps;
}

std::vector<SummaryRow> summarize(const std::vector<SeedRun>& runs) {
  std::vector<SummaryRow> out;
  if (runs.empty()) return out;
  for (std::size_t k = 0; k < runs.front().records.size(); ++k) {
    std::vector<double> values;
    double miss = 0.0;
    for (const auto& r : runs) {
      values.push_back(r.records.at(k).pseudo_regret);
      miss += r.records[k].one_minus_p_best;
    }
    SummaryRow row;
    row.t = runs.front().records[k].t;
    double sum = 0.0;
    for (double v : values) sum += v;
    row.mean = sum / static_cast<double>(values.size());
    row.q25 = quantile(values, 0.25);
    row.q75 = quantile(values, 0.75);
    row.min = *std::min_element(values.begin(), values.end());
    row.max = *std::max_element(values.begin(), values.end());
    row.mean_one_minus_p_best = miss / static_cast<double>(runs.size());
    out.push_back(row);
  }
  return out;
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void write_records_csv(std::ostream& out, const ExperimentConfig& c, const std::vector<SeedRun>& runs) {
  out << "seed,t,pseudo_regret,one_minus_p_best,candidate,setting,stack\n";
  for (const auto& r : runs)
    for (const auto& rec : r.records) {
      out << r.seed << ',' << rec.t << ',' << format_number(rec.pseudo_regret) << ','
          << format_number(rec.one_minus_p_best) << ',';
      if (rec.candidate) out << *rec.candidate;
      else out << "NA";
      out << ',' << to_string(c.setting) << ',' << to_string(c.stack) << '\n';
    }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary) {
  out << "t,mean,q25,q75,min,max,mean_one_minus_p_best\n";
  for (const auto& s : summary)
    out << s.t << ',' << format_number(s.mean) << ',' << format_number(s.q25) << ',' << format_number(s.q75) << ','
        << format_number(s.min) << ',' << format_number(s.max) << ',' << format_number(s.mean_one_minus_p_best)
        << '\n';
}

void write_switches_csv(std::ostream& out, const std::vector<SeedRun>& runs) {
  out << "seed," << switch_csv_header() << '\n';
  for (const auto& r : runs)
    for (const auto& s : r.switches) out << r.seed << ',' << switch_csv_row(s) << '\n';
}

RunResult run_experiment(const ExperimentConfig& c) {
  const Setup setup = prepare_setup(c);
  RunResult result;
  result.runs.resize(c.seeds.size());
  std::vector<std::exception_ptr> errors(c.seeds.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next++; i < c.seeds.size(); i = next++) {
      try {
        result.runs[i] = run_seed(c, setup, c.seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = worker_count(c.seeds.size());
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  result.summary = summarize(result.runs);
  for (const auto& r : result.runs) {
    result.audit.checks += r.audit.checks;
    result.audit.violations += r.audit.violations;
    result.audit.worst_ratio = std::max(result.audit.worst_ratio, r.audit.worst_ratio);
  }
  auto write = [](const std::string& path, auto&& fn) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    fn(out);
  };
  if (!c.output.empty()) {
    write(c.output, [&](std::ostream& o) { write_records_csv(o, c, result.runs); });
    write(c.summary_output.empty() ? c.output + ".summary.csv" : c.summary_output,
          [&](std::ostream& o) { write_summary_csv(o, result.summary); });
    if (c.stack == Stack::Full)
      write(c.switch_output.empty() ? c.output + ".switches.csv" : c.switch_output,
            [&](std::ostream& o) { write_switches_csv(o, result.runs); });
  }
  return result;
}

std::vector<double> pseudo_regret(const std::vector<std::size_t>& played,
                                  const std::vector<std::vector<double>>& expected) {
  if (played.size() != expected.size()) throw std::invalid_argument("play history and losses differ in length");
  std::vector<double> out;
  if (played.empty()) return out;
  const std::size_t n = expected.front().size();
  std::vector<double> totals(n, 0.0);
  for (const auto& row : expected)
    for (std::size_t i = 0; i < n; ++i) totals.at(i) += row.at(i);
  const auto best = static_cast<std::size_t>(std::min_element(totals.begin(), totals.end()) - totals.begin());
  double sum = 0.0;
  for (std::size_t t = 0; t < played.size(); ++t) {
    sum += expected[t].at(played[t]) - expected[t][best];
    out.push_back(sum);
  }
  return out;
}

namespace {

std::pair<double, double> regress(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (slope * x[i] + intercept);
    ss_res += r * r;
  }
  const double r2 = syy > 0.0 ? 1.0 - ss_res / syy : (ss_res == 0.0 ? 1.0 : 0.0);
  return {slope, r2};
}

}  // namespace

SlopeFit slope_fit(const std::vector<std::pair<double, double>>& curve) {
  if (curve.size() < 8) throw std::invalid_argument("slope fit needs at least 8 checkpoints");
  for (std::size_t i = 1; i < curve.size(); ++i)
    if (!(curve[i].first > curve[i - 1].first)) throw std::invalid_argument("checkpoints must increase strictly");
  if (!(curve.front().first > 0.0) || curve.back().first < 100.0 * curve.front().first)
    throw std::invalid_argument("checkpoints must span at least two decades");
  const std::size_t start = curve.size() / 2;
  std::vector<double> lx, sx, y;
  for (std::size_t i = start; i < curve.size(); ++i) {
    lx.push_back(std::log(curve[i].first));
    sx.push_back(std::sqrt(curve[i].first));
    y.push_back(curve[i].second);
  }
  SlopeFit fit;
  std::tie(fit.log_coefficient, fit.log_r2) = regress(lx, y);
  std::tie(fit.sqrt_coefficient, fit.sqrt_r2) = regress(sx, y);
  fit.points = y.size();
  return fit;
}

Verdict stochastic_verdict(const std::vector<std::pair<double, double>>& curve) {
  Verdict v;
  v.fit = slope_fit(curve);
  const double horizon = curve.back().first;
  const auto it = std::find_if(curve.begin(), curve.end(), [&](const auto& p) { return p.first == horizon / 16.0; });
  if (it == curve.end()) throw std::invalid_argument("verdict needs a checkpoint at T/16");
  v.ratio_at_end = curve.back().second / std::sqrt(horizon);
  v.ratio_earlier = it->second / std::sqrt(it->first);
  v.passes = v.fit.log_r2 > v.fit.sqrt_r2 && v.ratio_at_end < 0.5 * v.ratio_earlier;
  return v;
}

std::vector<std::pair<double, double>> mean_curve(const std::vector<SummaryRow>& summary) {
  std::vector<std::pair<double, double>> out;
  for (const auto& s : summary) out.emplace_back(static_cast<double>(s.t), s.mean);
  return out;
}

std::vector<std::pair<std::uint64_t, std::vector<std::pair<double, double>>>> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("seed,t,pseudo_regret", 0) != 0)
    throw std::invalid_argument("not a records CSV");
  std::map<std::uint64_t, std::vector<std::pair<double, double>>> curves;
  std::vector<std::uint64_t> order;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream cells(line);
    std::string seed, t, regret;
    std::getline(cells, seed, ',');
    std::getline(cells, t, ',');
    std::getline(cells, regret, ',');
    const auto s = std::stoull(seed);
    if (!curves.count(s)) order.push_back(s);
    curves[s].emplace_back(std::stod(t), std::stod(regret));
  }
  std::vector<std::pair<std::uint64_t, std::vector<std::pair<double, double>>>> out;
  for (auto s : order) out.emplace_back(s, curves[s]);
  return out;
}

}  // namespace bobw
