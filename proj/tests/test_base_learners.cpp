#include <cmath>
#include <vector>

#include "doctest.h"

#include "bobw/base_learners.hpp"
#include "bobw/invariants.hpp"

using namespace bobw;

namespace {

RoundLoss round_of(std::vector<double> values, int context = -1) {
  RoundLoss r;
  r.t = 1;
  r.values = std::move(values);
  r.context = context;
  return r;
}

}  // namespace

TEST_CASE("exp2 scalar case is plain importance weighting") {
  Exp2 learner({Eigen::VectorXd::Constant(1, 1.0)}, std::nullopt);
  const auto round = round_of({0.6});
  learner.prepare(IwRound{0.25});
  const auto obs = FeedbackModel::bandit().observe(round, 0);
  CHECK(learner.estimate(obs, true)[0] == doctest::Approx(0.6 / 0.25));
  CHECK(learner.estimate(obs.withheld(0), false)[0] == 0.0);
  Exp2 fresh({Eigen::VectorXd::Constant(1, 1.0)}, std::nullopt);
  CHECK(enumerate_estimate(fresh, IwRound{0.25}, round, FeedbackModel::bandit()).max_error < 1e-12);
}

TEST_CASE("exp2 enumeration on three spanning actions") {
  const Eigen::Vector2d theta(0.3, -0.4);
  ActionSet actions{Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(-0.6, 0.8)};
  std::vector<double> losses;
  for (const auto& a : actions) losses.push_back(a.dot(theta));
  Exp2 learner(actions, std::nullopt);
  const auto e = enumerate_estimate(learner, IwRound{0.5}, round_of(losses), FeedbackModel::bandit());
  CHECK(e.max_error < 1e-10);
}

TEST_CASE("exp2 first learning rate") {
  ActionSet actions;
  for (int k = 0; k < 8; ++k) actions.push_back(Eigen::Vector2d(std::cos(k * M_PI / 4), std::sin(k * M_PI / 4)));
  Exp2 learner(actions, std::nullopt, 0.1);
  learner.prepare(IwRound{1.0});
  CHECK(learner.dimension() == 2);
  const double cap = 1.0 / (2.0 * 2.0 * 1.1);
  CHECK(learner.learning_rate() == doctest::Approx(std::min(std::sqrt(std::log(8.0) / 2.0), cap)));
  CHECK(learner.exploration_weight() <= 0.5 + 1e-12);
}

TEST_CASE("exp4 single policy plays its arm") {
  Exp4 learner({{1, 0}}, 2, std::nullopt);
  learner.prepare(IwRound{1.0, std::nullopt, 0});
  CHECK(learner.arm_distribution() == std::vector<double>{0.0, 1.0});
}

TEST_CASE("exp4 first learning rate") {
  Exp4 learner({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, 2, std::nullopt);
  learner.prepare(IwRound{1.0, std::nullopt, 1});
  CHECK(learner.learning_rate() == doctest::Approx(std::sqrt(std::log(4.0) / 2.0)));
}

TEST_CASE("tsallis exponent") {
  TsallisGraph learner(FeedbackGraph::bandit(16), std::nullopt);
  CHECK(learner.exponent() == doctest::Approx(1.0 - 1.0 / std::log(16.0)));
  CHECK(learner.exponent() == doctest::Approx(0.6393).epsilon(1e-3));
}

TEST_CASE("tsallis with self-loops only is importance weighting") {
  TsallisGraph learner(FeedbackGraph::bandit(2), std::nullopt);
  learner.prepare(IwRound{0.5});
  const auto p = learner.play_distribution();
  const auto round = round_of({0.3, 0.8});
  const auto obs = FeedbackModel::graph(FeedbackGraph::bandit(2)).observe(round, 0);
  const auto est = learner.estimate(obs, true);
  CHECK(est[0] == doctest::Approx(0.3 / (0.5 * p[0])));
  CHECK(est[1] == doctest::Approx(0.0));
}

TEST_CASE("tsallis heavy loopless arm stays unbiased") {
  const auto g = FeedbackGraph::from_edges(3, {{1, 1}, {1, 0}, {2, 2}, {2, 0}});
  const auto feedback = FeedbackModel::graph(g);
  TsallisGraph learner(g, std::nullopt);
  const auto warm = round_of({0.0, 1.0, 1.0});
  for (int i = 0; i < 60; ++i) {
    learner.prepare(IwRound{1.0});
    if (learner.play_distribution()[0] > 0.8) break;
    learner.update(feedback.observe(warm, 1 + static_cast<std::size_t>(i % 2)), true);
  }
  learner.prepare(IwRound{1.0});
  CHECK(learner.play_distribution()[0] > 0.5);
  CHECK(learner.heavy_loopless() == std::vector<std::size_t>{0});
  const auto e = enumerate_estimate(learner, IwRound{0.5}, round_of({0.2, 0.7, 0.4}), feedback);
  CHECK(e.max_error < 1e-10);
}

TEST_CASE("weak exp3 mixture") {
  const auto p = WeakExp3::mix({1.0 / 3, 1.0 / 3, 1.0 / 3}, {0, 1, 2}, {0}, 3, 0.5);
  CHECK(p[0] == doctest::Approx(1.0 / 6 + 0.5));
  CHECK(p[1] == doctest::Approx(1.0 / 6));
  CHECK(p[2] == doctest::Approx(1.0 / 6));
}

TEST_CASE("weak exp3 learning rate after eight rounds") {
  const auto g = FeedbackGraph::from_edges(4, {{0, 0}, {0, 1}, {2, 2}, {2, 3}});
  WeakExp3 learner(g, std::nullopt);
  REQUIRE(learner.dominating().size() == 2);
  for (int t = 0; t < 8; ++t) learner.prepare(IwRound{1.0});
  const double expected = 1.0 / (std::pow(std::sqrt(2.0) * 8.0 / std::log(4.0), 2.0 / 3.0) + 8.0);
  CHECK(learner.learning_rate() == doctest::Approx(expected));
}

TEST_CASE("weak exp3 enumeration on a three-node graph") {
  const auto g = FeedbackGraph::from_edges(3, {{0, 0}, {0, 1}, {0, 2}});
  WeakExp3 learner(g, std::nullopt);
  const auto e = enumerate_estimate(learner, IwRound{0.5}, round_of({0.1, 0.6, 0.9}), FeedbackModel::graph(g));
  CHECK(e.max_error < 1e-10);
}

TEST_CASE("weak exp3 exploration stays at most one half") {
  const auto g = FeedbackGraph::from_edges(3, {{0, 0}, {0, 1}, {0, 2}});
  WeakExp3 learner(g, std::nullopt);
  for (double q : {1.0, 0.01, 0.5, 0.001, 1.0}) {
    learner.prepare(IwRound{q});
    CHECK(learner.exploration() <= 0.5 + 1e-12);
  }
  CHECK(learner.exploration_clamps() == 0);
}

TEST_CASE("log barrier starts uniform and is unbiased") {
  LogBarrierMab two(2, std::nullopt, 100);
  two.prepare(IwRound{1.0});
  CHECK(two.play_distribution()[0] == doctest::Approx(0.5));

  LogBarrierMab three(3, std::nullopt, 100);
  const auto e = enumerate_estimate(three, IwRound{0.5}, round_of({0.2, 0.5, 0.9}), FeedbackModel::bandit());
  CHECK(e.max_error < 1e-10);

  LogBarrierMab gated(3, std::nullopt, 100);
  const auto g = enumerate_estimate(gated, IwRound{0.5, 1}, round_of({0.2, 0.5, 0.9}), FeedbackModel::bandit());
  CHECK(g.max_error < 1e-10);
}

TEST_CASE("excluded arm gets no mass") {
  LogBarrierMab learner(4, 2, 100);
  learner.prepare(IwRound{1.0});
  CHECK(learner.play_distribution()[2] == 0.0);
  CHECK(learner.arms() == std::vector<std::size_t>{0, 1, 3});
}

TEST_CASE("update probability outside (0, 1] is rejected") {
  LogBarrierMab learner(2, std::nullopt, 10);
  CHECK_THROWS(learner.prepare(IwRound{0.0}));
  CHECK_THROWS(learner.prepare(IwRound{1.5}));
}
