#include "bobw/invariants.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "bobw/harness.hpp"

namespace bobw {

std::size_t InvariantReport::failures() const {
  return static_cast<std::size_t>(std::count_if(items.begin(), items.end(), [](const auto& i) { return !i.passed; }));
}

void InvariantReport::append(const InvariantReport& other) {
  items.insert(items.end(), other.items.begin(), other.items.end());
}

namespace {

std::string join(const std::vector<double>& v) {
  std::ostringstream out;
  out.precision(12);
  out << '[';
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v[i];
  out << ']';
  return out.str();
}

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

std::vector<double> random_simplex(Rng& rng, std::size_t n) {
  std::vector<double> p(n);
  const double skew = uniform(rng, 0.0, 3.0);
  double total = 0.0;
  for (auto& x : p) {
    x = std::pow(-std::log(1.0 - uniform01(rng)) + 1e-12, 1.0 + skew);
    total += x;
  }
  for (auto& x : p) x = std::max(x / total, 1e-9);
  total = 0.0;
  for (double x : p) total += x;
  for (auto& x : p) x /= total;
  return p;
}

using LossGenerator = std::function<RoundLoss(std::size_t t, Rng& rng)>;

// Feeds synthetic rounds so the learner reaches a non-uniform state.
void warm_up(IwLearner& learner, const FeedbackModel& feedback, const LossGenerator& gen, std::size_t rounds,
             double q, Rng& rng, std::optional<std::size_t> always_observed = std::nullopt) {
  for (std::size_t t = 1; t <= rounds; ++t) {
    const RoundLoss loss = gen(t, rng);
    const IwRound round{q, always_observed, loss.context};
    learner.prepare(round);
    const std::size_t played = learner.sample(rng);
    const bool updated = bernoulli(rng, round.q_for(played));
    const Observation obs = feedback.observe(loss, played);
    if (updated) learner.update(obs, true);
    else learner.update(obs.withheld(played), false);
  }
}

struct BaseCase {
  std::string label;
  std::function<std::unique_ptr<IwLearner>()> make;
  FeedbackModel feedback;
  LossGenerator warm;
  LossGenerator probe;
  std::optional<std::size_t> always_observed;
};

std::vector<BaseCase> base_cases() {
  std::vector<BaseCase> cases;

  const ActionSet actions{Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(-0.6, -0.8)};
  auto linear_loss = [actions](double a, double b) {
    RoundLoss r;
    for (const auto& x : actions) r.values.push_back(a * x(0) + b * x(1));
    return r;
  };
  for (std::optional<std::size_t> ex : {std::optional<std::size_t>{}, std::optional<std::size_t>{0},
                                        std::optional<std::size_t>{2}}) {
    cases.push_back({"exp2 excluded=" + (ex ? std::to_string(*ex) : std::string("none")),
                     [actions, ex] { return std::make_unique<Exp2>(actions, ex); }, FeedbackModel::bandit(),
                     [linear_loss](std::size_t, Rng&) { return linear_loss(0.3, -0.2); },
                     [linear_loss](std::size_t, Rng& rng) {
                       return linear_loss(uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5));
                     },
                     std::nullopt});
  }

  const std::vector<std::vector<std::size_t>> policies{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  auto contextual_loss = [policies](Rng& rng, double bias) {
    RoundLoss r;
    r.context = static_cast<int>(uniform01(rng) * 2.0);
    const double arm0 = std::clamp(uniform01(rng) - bias, 0.0, 1.0);
    const double arm1 = uniform01(rng);
    for (const auto& p : policies) r.values.push_back(p[static_cast<std::size_t>(r.context)] == 0 ? arm0 : arm1);
    return r;
  };
  for (std::optional<std::size_t> ex : {std::optional<std::size_t>{}, std::optional<std::size_t>{1}}) {
    cases.push_back({"exp4 excluded=" + (ex ? std::to_string(*ex) : std::string("none")),
                     [policies, ex] { return std::make_unique<Exp4>(policies, 2, ex); }, FeedbackModel::bandit(),
                     [contextual_loss](std::size_t, Rng& rng) { return contextual_loss(rng, 0.4); },
                     [contextual_loss](std::size_t, Rng& rng) { return contextual_loss(rng, 0.0); }, std::nullopt});
  }

  auto uniform_loss = [](std::size_t n) {
    return [n](std::size_t, Rng& rng) {
      RoundLoss r;
      for (std::size_t i = 0; i < n; ++i) r.values.push_back(uniform01(rng));
      return r;
    };
  };
  auto favour = [](std::size_t n, std::size_t good) {
    return [n, good](std::size_t, Rng&) {
      RoundLoss r;
      r.values.assign(n, 1.0);
      r.values[good] = 0.0;
      return r;
    };
  };

  std::vector<std::pair<std::string, FeedbackGraph>> strong;
  strong.emplace_back("bandit", FeedbackGraph::bandit(4));
  {
    FeedbackGraph g(4);
    for (std::size_t i = 0; i < 3; ++i) g.add_edge(i, i);
    for (std::size_t i = 0; i < 3; ++i) g.add_edge(i, 3);
    g.add_edge(3, 0);
    strong.emplace_back("one-loopless", g);
  }
  {
    FeedbackGraph g(4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        if (i != j) g.add_edge(i, j);
    strong.emplace_back("loopless-complete", g);
  }
  for (const auto& [label, g] : strong)
    for (std::optional<std::size_t> ex : {std::optional<std::size_t>{}, std::optional<std::size_t>{0}}) {
      cases.push_back({"tsallis " + label + " excluded=" + (ex ? std::to_string(*ex) : std::string("none")),
                       [g = g, ex] { return std::make_unique<TsallisGraph>(g, ex); }, FeedbackModel::graph(g),
                       favour(4, 3), uniform_loss(4), std::nullopt});
    }

  std::vector<std::pair<std::string, FeedbackGraph>> weak;
  {
    FeedbackGraph g(4);
    for (std::size_t j = 0; j < 4; ++j) g.add_edge(0, j);
    weak.emplace_back("star", g);
  }
  {
    FeedbackGraph g(4);
    for (std::size_t i = 0; i < 4; ++i) g.add_edge(i, (i + 1) % 4);
    weak.emplace_back("cycle", g);
  }
  for (const auto& [label, g] : weak)
    for (std::optional<std::size_t> ex :
         {std::optional<std::size_t>{}, std::optional<std::size_t>{0}, std::optional<std::size_t>{2}}) {
      cases.push_back({"weak-exp3 " + label + " excluded=" + (ex ? std::to_string(*ex) : std::string("none")),
                       [g = g, ex] { return std::make_unique<WeakExp3>(g, ex); }, FeedbackModel::graph(g),
                       favour(4, 1), uniform_loss(4), std::nullopt});
    }

  cases.push_back({"log-barrier", [] { return std::make_unique<LogBarrierMab>(3, std::nullopt, 64); },
                   FeedbackModel::bandit(), favour(3, 0), uniform_loss(3), std::nullopt});
  cases.push_back({"log-barrier always-observed=1", [] { return std::make_unique<LogBarrierMab>(3, std::nullopt, 64); },
                   FeedbackModel::bandit(), favour(3, 0), uniform_loss(3), std::size_t{1}});
  cases.push_back({"log-barrier excluded=2", [] { return std::make_unique<LogBarrierMab>(3, std::size_t{2}, 64); },
                   FeedbackModel::bandit(), favour(3, 0), uniform_loss(3), std::nullopt});
  return cases;
}

CheckItem unbiasedness_item(const BaseCase& c, IwLearner& learner, std::uint64_t seed, std::size_t index) {
  CheckItem item{"unbiased " + learner.name() + " [" + c.label + "]", true, ""};
  Rng rng = derive_rng(seed, {11, index});
  double worst = 0.0;
  for (double q : {1.0, 0.55, 0.2}) {
    for (int trial = 0; trial < 3; ++trial) {
      const RoundLoss loss = c.probe(0, rng);
      const IwRound round{q, c.always_observed, loss.context};
      const auto e = enumerate_estimate(learner, round, loss, c.feedback);
      worst = std::max(worst, e.max_error);
      if (e.max_error > 1e-10 && item.passed) {
        item.passed = false;
        std::ostringstream msg;
        msg << "q=" << q << " context=" << loss.context << " loss=" << join(loss.values)
            << " expected=" << join(e.expected) << " target=" << join(e.target) << " max error " << e.max_error;
        item.detail = msg.str();
      }
    }
  }
  if (item.passed) {
    std::ostringstream msg;
    msg << "max error " << worst;
    item.detail = msg.str();
  }
  return item;
}

std::unique_ptr<IwLearner> warmed(const BaseCase& c, std::uint64_t seed, std::size_t index) {
  auto learner = c.make();
  Rng rng = derive_rng(seed, {10, index});
  warm_up(*learner, c.feedback, c.warm, 40, 0.7, rng, c.always_observed);
  return learner;
}

// Brute-force independence number over all subsets, using adjacency masks.
std::size_t brute_independence(const std::vector<std::uint32_t>& adj) {
  const std::size_t n = adj.size();
  std::size_t best = 0;
  for (std::uint32_t s = 0; s < (1U << n); ++s) {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i)
      if (((s >> i) & 1U) && (adj[i] & s)) ok = false;
    if (ok) best = std::max<std::size_t>(best, static_cast<std::size_t>(std::popcount(s)));
  }
  return best;
}

struct GraphOracle {
  std::size_t alpha;
  std::size_t weak_alpha;
  Observability kind;
};

GraphOracle oracle(const FeedbackGraph& g) {
  const std::size_t n = g.size();
  std::vector<std::uint32_t> any(n, 0), both(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const bool ij = g.has_edge(i, j);
      const bool ji = g.has_edge(j, i);
      if (ij || ji) any[i] |= 1U << j;
      if (ij && ji) both[i] |= 1U << j;
    }
  bool strong = true;
  bool weak = true;
  for (std::size_t j = 0; j < n; ++j) {
    bool observed = false;
    bool by_all_others = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (g.has_edge(i, j)) observed = true;
      if (i != j && !g.has_edge(i, j)) by_all_others = false;
    }
    if (!observed) weak = false;
    if (!g.has_edge(j, j) && !by_all_others) strong = false;
  }
  const auto kind = !weak ? Observability::Unobservable : (strong ? Observability::Strong : Observability::Weak);
  return {brute_independence(any), brute_independence(both), kind};
}

bool covers(const FeedbackGraph& g, const std::vector<std::size_t>& set) {
  for (std::size_t j = 0; j < g.size(); ++j) {
    bool hit = false;
    for (auto d : set) hit = hit || g.has_edge(d, j);
    if (!hit) return false;
  }
  return true;
}

struct GraphTally {
  std::size_t graphs = 0;
  std::size_t alpha_mismatch = 0;
  std::size_t weak_alpha_mismatch = 0;
  std::size_t order_violation = 0;
  std::size_t class_mismatch = 0;
  std::size_t cover_failure = 0;
  std::size_t surrogate_checks = 0;
  std::size_t surrogate_failure = 0;
  double surrogate_error = 0.0;
  std::string first_failure;
};

void note_failure(GraphTally& t, const FeedbackGraph& g, const std::string& what) {
  if (!t.first_failure.empty()) return;
  std::ostringstream out;
  out << what << " on graph n=" << g.size() << " edges:";
  for (auto [i, j] : g.edges()) out << ' ' << i << "->" << j;
  t.first_failure = out.str();
}

// Exact two-level enumeration: side 1 plays the candidate, side 2 draws from base_p.
void check_surrogate(GraphTally& tally, const FeedbackGraph& g, Rng& rng, bool played_variant) {
  const std::size_t n = g.size();
  for (std::size_t cand = 0; cand < n; ++cand) {
    std::vector<double> loss(n), p(n, 0.0);
    for (auto& l : loss) l = uniform01(rng);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != cand) total += (p[j] = uniform(rng, 0.05, 1.0));
    for (auto& x : p) x /= total;
    const double q2 = uniform(rng, 0.05, 0.95);
    const auto tilde = surrogate_loss(g, cand, loss, p);

    double lhs_candidate = 0.0, rhs_candidate = 0.0, lhs_mixture = 0.0, rhs_mixture = 0.0;
    double tilde_base = 0.0, base = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      tilde_base += p[j] * tilde[j];
      base += p[j] * loss[j];
    }
    const double tilde_played = (1.0 - q2) * tilde[cand] + q2 * tilde_base;
    const double played = (1.0 - q2) * loss[cand] + q2 * base;
    lhs_candidate = tilde_played - tilde[cand];
    rhs_candidate = played - loss[cand];
    lhs_mixture = tilde_played - tilde_base;
    rhs_mixture = played - base;
    double err = std::max(std::abs(lhs_candidate - rhs_candidate), std::abs(lhs_mixture - rhs_mixture));
    for (double x : tilde)
      if (x < -1.0 - 1e-12 || x > 1.0 + 1e-12) err = std::max(err, 1.0);

    if (played_variant) {
      RoundLoss round{1, loss, -1};
      const FeedbackModel fb = FeedbackModel::graph(g);
      for (std::size_t a = 0; a < n; ++a) {
        const Observation obs = fb.observe(round, a);
        const double v = surrogate_played_loss(g, cand, a, [&](std::size_t j) { return obs.loss(j); }, p);
        err = std::max(err, std::abs(v - tilde[a]));
      }
    }
    ++tally.surrogate_checks;
    tally.surrogate_error = std::max(tally.surrogate_error, err);
    if (err > 1e-12) {
      ++tally.surrogate_failure;
      note_failure(tally, g, "surrogate identity (candidate " + std::to_string(cand) + ")");
    }
  }
}

void check_graph(GraphTally& tally, const FeedbackGraph& g, Rng& rng, bool surrogate, bool played_variant) {
  ++tally.graphs;
  const auto o = oracle(g);
  const auto a = independence_number(g);
  const auto wa = weak_independence_number(g);
  if (a != o.alpha) {
    ++tally.alpha_mismatch;
    note_failure(tally, g, "alpha " + std::to_string(a) + " vs brute force " + std::to_string(o.alpha));
  }
  if (wa != o.weak_alpha) {
    ++tally.weak_alpha_mismatch;
    note_failure(tally, g, "weak alpha " + std::to_string(wa) + " vs brute force " + std::to_string(o.weak_alpha));
  }
  if (wa < a) {
    ++tally.order_violation;
    note_failure(tally, g, "weak alpha below alpha");
  }
  const auto kind = classify(g);
  if (kind != o.kind) {
    ++tally.class_mismatch;
    note_failure(tally, g, "classification " + to_string(kind) + " vs " + to_string(o.kind));
  }
  if (o.kind != Observability::Unobservable) {
    const auto d = dominating_set(g);
    if (!covers(g, d)) {
      ++tally.cover_failure;
      note_failure(tally, g, "dominating set does not cover");
    }
  }
  if (surrogate && o.kind == Observability::Strong) check_surrogate(tally, g, rng, played_variant);
}

FeedbackGraph from_masks(const std::vector<std::uint32_t>& out) {
  FeedbackGraph g(out.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = 0; j < out.size(); ++j)
      if ((out[i] >> j) & 1U) g.add_edge(i, j);
  return g;
}

InvariantReport tally_report(const GraphTally& t, const std::string& label) {
  InvariantReport r;
  auto add = [&](const std::string& name, std::size_t bad, const std::string& extra = "") {
    r.items.push_back({label + ": " + name, bad == 0,
                       std::to_string(bad) + " failures over " + std::to_string(t.graphs) + " graphs" + extra +
                           (bad ? "; first: " + t.first_failure : "")});
  };
  add("alpha matches brute force", t.alpha_mismatch);
  add("weak alpha matches brute force", t.weak_alpha_mismatch);
  add("weak alpha >= alpha", t.order_violation);
  add("observability matches definition", t.class_mismatch);
  add("greedy dominating set covers", t.cover_failure);
  std::ostringstream extra;
  extra << ", " << t.surrogate_checks << " candidate instances, max error " << t.surrogate_error;
  add("surrogate expectation identities", t.surrogate_failure, extra.str());
  return r;
}

}  // namespace

Enumeration enumerate_estimate(IwLearner& learner, const IwRound& round, const RoundLoss& loss,
                               const FeedbackModel& feedback) {
  learner.prepare(round);
  const auto p = learner.play_distribution();
  Enumeration e;
  e.target = learner.target_losses(loss);
  e.expected.assign(e.target.size(), 0.0);
  for (std::size_t a = 0; a < p.size(); ++a) {
    if (p[a] <= 0.0) continue;
    const double q = round.q_for(a);
    const Observation obs = feedback.observe(loss, a);
    const auto hit = learner.estimate(obs, true);
    for (std::size_t i = 0; i < hit.size(); ++i) e.expected[i] += p[a] * q * hit[i];
    if (q < 1.0) {
      const auto miss = learner.estimate(obs.withheld(a), false);
      for (std::size_t i = 0; i < miss.size(); ++i) e.expected[i] += p[a] * (1.0 - q) * miss[i];
    }
  }
  for (std::size_t i = 0; i < e.target.size(); ++i)
    e.max_error = std::max(e.max_error, std::abs(e.expected[i] - e.target[i]));
  return e;
}

std::vector<double> SignFlippedLearner::estimate(const Observation& obs, bool updated) const {
  auto est = inner_.estimate(obs, updated);
  if (!est.empty()) est[0] = -est[0];
  return est;
}

InvariantReport unbiasedness_suite(std::uint64_t seed) {
  InvariantReport report;
  const auto cases = base_cases();
  for (std::size_t k = 0; k < cases.size(); ++k) {
    auto learner = warmed(cases[k], seed, k);
    auto item = unbiasedness_item(cases[k], *learner, seed, k);
    if (auto* ts = dynamic_cast<TsallisGraph*>(learner.get())) {
      learner->prepare(IwRound{1.0, std::nullopt, -1});
      item.detail += "; heavy loopless arms: " + std::to_string(ts->heavy_loopless().size());
    }
    report.items.push_back(item);
  }
  return report;
}

InvariantReport negative_control_suite(std::uint64_t seed) {
  InvariantReport report;
  const auto cases = base_cases();
  for (std::size_t k = 0; k < cases.size(); ++k) {
    auto learner = warmed(cases[k], seed, k);
    SignFlippedLearner flipped(*learner);
    const auto item = unbiasedness_item(cases[k], flipped, seed, k);
    report.items.push_back({"negative control detects " + flipped.name() + " [" + cases[k].label + "]", !item.passed,
                            item.passed ? "corrupted estimator was not detected" : "counterexample: " + item.detail});
  }
  return report;
}

InvariantReport stability_suite(std::size_t instances, std::uint64_t seed) {
  InvariantReport report;
  enum Kind { NegNonneg, NegSigned, TsallisKind, Barrier };
  const std::vector<std::pair<Kind, std::string>> kinds{{NegNonneg, "negentropy-nonnegative"},
                                                        {NegSigned, "negentropy-signed"},
                                                        {TsallisKind, "tsallis-nonnegative"},
                                                        {Barrier, "log-barrier"}};
  for (const auto& [kind, label] : kinds) {
    std::size_t violations = 0;
    double worst = -1e300;
    std::string first;
    for (std::size_t k = 0; k < instances; ++k) {
      Rng rng = derive_rng(seed, {20, static_cast<std::uint64_t>(kind), k});
      const std::size_t n = 2 + static_cast<std::size_t>(uniform01(rng) * 7.0);
      const auto p = random_simplex(rng, n);
      const double scale = std::exp(uniform(rng, std::log(1e-3), std::log(10.0)));
      std::vector<double> loss(n);
      Regularizer reg = Regularizer::neg_entropy();
      for (std::size_t i = 0; i < n; ++i) {
        const double big = std::exp(uniform(rng, std::log(1e-2), std::log(20.0))) / scale;
        switch (kind) {
          case NegNonneg:
          case TsallisKind:
            loss[i] = uniform01(rng) * big;
            break;
          case NegSigned:
            loss[i] = uniform01(rng) < 0.5 ? -uniform(rng, 0.0, 0.999) / scale : uniform01(rng) * big;
            break;
          case Barrier:
            loss[i] = uniform01(rng) < 0.5 ? -uniform(rng, 0.0, 0.5) / (scale * p[i]) : uniform01(rng) * big;
            break;
        }
      }
      if (kind == NegSigned) loss[0] = -uniform(rng, 1e-6, 0.999) / scale;
      if (kind == TsallisKind) reg = Regularizer::tsallis(uniform(rng, 0.05, 0.95));
      if (kind == Barrier) reg = Regularizer::log_barrier();
      const auto b = stability_bound(reg, p, loss, scale);
      const double excess = b.lhs - b.rhs;
      worst = std::max(worst, excess);
      const bool wrong_lemma = b.lemma != label;
      if (excess > 1e-9 || wrong_lemma) {
        if (first.empty()) {
          std::ostringstream msg;
          msg << "lemma " << b.lemma << " p=" << join(p) << " loss=" << join(loss) << " scale=" << scale
              << " lhs=" << b.lhs << " rhs=" << b.rhs;
          first = msg.str();
        }
        ++violations;
      }
    }
    std::ostringstream detail;
    detail << violations << " violations over " << instances << " instances, max lhs - rhs " << worst;
    if (violations) detail << "; first: " << first;
    report.items.push_back({"stability " + label, violations == 0, detail.str()});
  }
  return report;
}

InvariantReport graph_suite(std::size_t exhaustive_nodes, std::size_t random_graphs, std::size_t random_max_nodes,
                            std::uint64_t seed) {
  if (exhaustive_nodes > 5) throw std::invalid_argument("exhaustive graph enumeration is limited to 5 nodes");
  GraphTally exhaustive;
  Rng rng = derive_rng(seed, {30});
  for (std::size_t n = 1; n <= exhaustive_nodes; ++n) {
    const std::uint64_t count = 1ULL << (n * n);
    std::vector<std::uint32_t> out(n);
    for (std::uint64_t code = 0; code < count; ++code) {
      for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<std::uint32_t>((code >> (i * n)) & ((1U << n) - 1));
      check_graph(exhaustive, from_masks(out), rng, true, n <= 4);
    }
  }
  GraphTally random;
  for (std::size_t k = 0; k < random_graphs; ++k) {
    Rng g_rng = derive_rng(seed, {31, k});
    const std::size_t n = 1 + static_cast<std::size_t>(uniform01(g_rng) * static_cast<double>(random_max_nodes));
    const double density = uniform(g_rng, 0.1, 0.9);
    std::vector<std::uint32_t> out(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (uniform01(g_rng) < density) out[i] |= 1U << j;
    check_graph(random, from_masks(out), g_rng, true, true);
  }
  InvariantReport report = tally_report(exhaustive, "all graphs n<=" + std::to_string(exhaustive_nodes));
  report.append(tally_report(random, std::to_string(random_graphs) + " random graphs n<=" +
                                         std::to_string(random_max_nodes)));
  return report;
}

InvariantReport audit_suite(std::size_t horizon, std::size_t seeds) {
  InvariantReport report;
  struct Variant {
    std::string label;
    Setting setting;
    Stack stack;
    CorralChoice corral;
    Regime regime;
  };
  const std::vector<Variant> variants{
      {"corral-strong mab stochastic", Setting::Mab, Stack::Full, CorralChoice::Default, Regime::Stochastic},
      {"corral-strong mab alternating", Setting::Mab, Stack::Full, CorralChoice::Default, Regime::Alternating},
      {"corral-dd first-order mab", Setting::Mab, Stack::BaseCorral, CorralChoice::DataDependentFirst,
       Regime::Stochastic},
      {"corral-1/2 linear", Setting::Linear, Stack::Full, CorralChoice::Default, Regime::Stochastic},
      {"corral-1/2 contextual", Setting::Contextual, Stack::Full, CorralChoice::Default, Regime::Stochastic},
      {"corral-1/2 graph-strong", Setting::GraphStrong, Stack::Full, CorralChoice::Default, Regime::Stochastic},
      {"corral-2/3 graph-weak", Setting::GraphWeak, Stack::Full, CorralChoice::Default, Regime::Stochastic},
  };
  for (const auto& v : variants) {
    ExperimentConfig c;
    c.setting = v.setting;
    c.stack = v.stack;
    c.corral = v.corral;
    c.regime = v.regime;
    c.horizon = horizon;
    c.audit = AuditPolicy::Record;
    c.seeds.clear();
    for (std::size_t s = 1; s <= seeds; ++s) c.seeds.push_back(s);
    const auto result = run_experiment(c);
    std::ostringstream detail;
    detail << result.audit.checks << " checks, " << result.audit.violations << " violations, worst ratio "
           << result.audit.worst_ratio;
    report.items.push_back({"bonus caps " + v.label, result.audit.violations == 0, detail.str()});
  }
  return report;
}

InvariantReport check_invariants(const std::vector<std::string>& scope) {
  static const std::vector<std::string> all{"unbiasedness", "negative-control", "stability", "graphs", "audit"};
  const auto& chosen = scope.empty() ? all : scope;
  InvariantReport report;
  for (const auto& s : chosen) {
    if (s == "unbiasedness") report.append(unbiasedness_suite());
    else if (s == "negative-control") report.append(negative_control_suite());
    else if (s == "stability") report.append(stability_suite());
    else if (s == "graphs") report.append(graph_suite());
    else if (s == "audit") report.append(audit_suite());
    else throw std::invalid_argument("unknown invariant scope: " + s);
  }
  return report;
}

}  // namespace bobw
