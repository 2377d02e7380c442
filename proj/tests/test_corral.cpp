#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"

#include "bobw/corral.hpp"
#include "bobw/environments.hpp"

using namespace bobw;

TEST_CASE("half corral learning rate, mixture and bonus") {
  CHECK(CorralHalf::learning_rate(1, 1.0) == doctest::Approx(1.0 / 9.0));
  for (std::size_t t : {1, 2, 7, 100}) {
    const auto q = CorralHalf::mix({0.3, 0.7}, t);
    CHECK(q[0] + q[1] == doctest::Approx(1.0).epsilon(1e-14));
  }
  const std::vector<double> history{1.0, 0.25};
  CHECK(CorralHalf::bonus_for(4.0, 1.0, history) == doctest::Approx(std::sqrt(20.0) + 4.0));
}

TEST_CASE("half corral estimate is unbiased") {
  const std::array<double, 2> q{0.35, 0.65};
  const std::array<double, 2> side_loss{0.4, -0.3};
  std::array<double, 2> expected{0.0, 0.0};
  for (int side = 1; side <= 2; ++side) {
    const auto z = CorralHalf::loss_estimate(side, side_loss[side - 1], q);
    for (int i = 0; i < 2; ++i) expected[i] += q[side - 1] * z[i];
  }
  CHECK(expected[0] == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(expected[1] == doctest::Approx(-0.3).epsilon(1e-14));
}

TEST_CASE("two-thirds corral learning rate and exploration") {
  CHECK(CorralTwoThirds::learning_rate(8, 1.0) == doctest::Approx(1.0 / 12.0));
  CHECK(CorralTwoThirds::gamma_for(0.04, 1.0) == doctest::Approx(0.2));
  const double gamma = CorralTwoThirds::solve_gamma(0.04, 0.9);
  CHECK(gamma == doctest::Approx(CorralTwoThirds::gamma_for(0.04, (1.0 - gamma) * 0.9)).epsilon(1e-12));
}

TEST_CASE("two-thirds corral estimate is unbiased over both coins") {
  const std::array<double, 2> qbar{0.2, 0.8};
  const std::array<double, 2> side_loss{0.9, 0.1};
  const double gamma = 0.3;
  std::array<double, 2> expected{0.0, 0.0};
  for (int side = 1; side <= 2; ++side)
    for (bool reveal : {false, true}) {
      const double w = qbar[side - 1] * (reveal ? gamma : 1.0 - gamma);
      const auto z = CorralTwoThirds::loss_estimate(side, reveal, side_loss[side - 1], gamma, qbar);
      for (int i = 0; i < 2; ++i) expected[i] += w * z[i];
    }
  CHECK(expected[0] == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(expected[1] == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("data-dependent corral learning rate and estimate") {
  CHECK(CorralDataDependent::learning_rate(0.0, 1.0, 0.0, std::exp(1.0)) == doctest::Approx(0.25));
  const std::array<double, 2> q{0.6, 0.4};
  const std::array<double, 2> side_loss{0.5, 0.7};
  for (const std::array<double, 2> y : {std::array<double, 2>{0.0, 0.0}, {0.3, -0.8}}) {
    std::array<double, 2> expected{0.0, 0.0};
    for (int side = 1; side <= 2; ++side) {
      const auto z = CorralDataDependent::loss_estimate(side, side_loss[side - 1], y, q);
      for (int i = 0; i < 2; ++i) expected[i] += q[side - 1] * z[i];
    }
    CHECK(expected[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(expected[1] == doctest::Approx(0.7).epsilon(1e-14));
  }
  const auto dd = CorralDataDependent::loss_estimate(2, 0.3, {-1.0, -1.0}, q);
  const auto half = CorralHalf::loss_estimate(2, 0.3, q);
  CHECK(dd[0] == doctest::Approx(half[0]));
  CHECK(dd[1] == doctest::Approx(half[1]));
}

TEST_CASE("data-dependent corral with perfect predictions keeps its learning rate") {
  const std::vector<double> row{0.2, 0.6, 0.9};
  const auto model = LossModel::scripted(std::vector<std::vector<double>>(200, row), LossRange::ZeroOne);
  CorralOptions options;
  options.keep_trace = true;
  options.audit = AuditPolicy::Record;
  CorralDataDependent corral(0, std::make_unique<LogBarrierMab>(3, 0, 200, StabilityClass::DataDependentHalf), 200,
                             DataDependence::SecondOrder, [&](std::size_t) { return row; }, options);
  Rng rng(3);
  const auto feedback = FeedbackModel::bandit();
  for (std::size_t t = 1; t <= 200; ++t) {
    const auto round = model.next_loss(t, rng);
    corral.observe(feedback.observe(round, corral.act(t, -1, rng)));
  }
  const auto& trace = corral.trace();
  REQUIRE(trace.size() == 200);
  for (const auto& row_trace : trace) CHECK(row_trace.eta == doctest::Approx(trace.front().eta));
}

TEST_CASE("strong corral learning rate") {
  CHECK(CorralStrong::learning_rate(4, 1.0) == doctest::Approx(0.1));
}

TEST_CASE("strong corral ignores rounds where the base proposes the candidate") {
  const auto model = LossModel::stochastic({0.5, 0.25, 0.5}, LossRange::ZeroOne);
  CorralOptions options;
  options.keep_trace = true;
  options.audit = AuditPolicy::Record;
  CorralStrong corral(1, std::make_unique<LogBarrierMab>(3, std::nullopt, 500), options);
  Rng rng(5);
  const auto feedback = FeedbackModel::bandit();
  std::size_t gated = 0;
  for (std::size_t t = 1; t <= 500; ++t) {
    const auto before = corral.cumulative();
    const auto round = model.next_loss(t, rng);
    const auto played = corral.act(t, -1, rng);
    corral.observe(feedback.observe(round, played));
    if (corral.trace().back().side == 2 && played == 1) {
      ++gated;
      CHECK(corral.cumulative() == before);
    }
  }
  CHECK(gated > 0);
  CHECK(corral.audit().violations() == 0);
}

TEST_CASE("half corral plays valid actions and keeps the caps") {
  const auto model = LossModel::stochastic({0.5, 0.5, 0.25}, LossRange::ZeroOne);
  CorralOptions options;
  options.audit = AuditPolicy::Abort;
  CorralHalf corral(0, std::make_unique<TsallisGraph>(FeedbackGraph::bandit(3), 0), options);
  Rng rng(9);
  const auto feedback = FeedbackModel::bandit();
  for (std::size_t t = 1; t <= 2000; ++t) {
    const auto round = model.next_loss(t, rng);
    const auto played = corral.act(t, -1, rng);
    REQUIRE(played < 3);
    const auto p = corral.action_distribution();
    double sum = 0.0;
    for (double x : p) sum += x;
    CHECK(sum == doctest::Approx(1.0));
    corral.observe(feedback.observe(round, played));
  }
  CHECK(corral.audit().violations() == 0);
  CHECK(corral.audit().checks() > 0);
}

TEST_CASE("bonus audit") {
  auto tally = std::make_shared<AuditTally>();
  BonusAudit record(AuditPolicy::Record, tally);
  CHECK(record.check(1, "cap", 0.2));
  CHECK_FALSE(record.check(2, "cap", 0.3));
  CHECK(record.violations() == 1);
  CHECK(tally->checks == 2);
  CHECK(tally->violations == 1);
  CHECK(tally->worst_ratio == doctest::Approx(1.2));
  BonusAudit abort(AuditPolicy::Abort);
  CHECK_THROWS_AS(abort.check(1, "cap", 0.3), BonusConditionViolation);
}
