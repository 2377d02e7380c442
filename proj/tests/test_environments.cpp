#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"

#include "bobw/environments.hpp"

using namespace bobw;

TEST_CASE("scripted losses pass through") {
  const auto model = LossModel::scripted({{0.0, 1.0}, {1.0, 0.0}}, LossRange::ZeroOne);
  Rng rng(1);
  CHECK(model.next_loss(2, rng).values == std::vector<double>{1.0, 0.0});
  CHECK(model.is_adversarial());
  CHECK_THROWS(model.next_loss(3, rng));
}

TEST_CASE("scripted losses from csv") {
  std::istringstream in("0,1\n1,0\n0.5,0.25\n");
  const auto model = LossModel::scripted_csv(in, LossRange::ZeroOne);
  Rng rng(1);
  CHECK(model.next_loss(3, rng).values == std::vector<double>{0.5, 0.25});
}

TEST_CASE("bernoulli empirical means") {
  const auto model = LossModel::stochastic({0.25, 0.5}, LossRange::ZeroOne);
  Rng rng(3);
  const int draws = 100000;
  std::vector<double> sums(2, 0.0);
  for (int t = 1; t <= draws; ++t) {
    const auto round = model.next_loss(static_cast<std::size_t>(t), rng);
    for (std::size_t i = 0; i < 2; ++i) sums[i] += round.values[i];
  }
  for (std::size_t i = 0; i < 2; ++i) {
    const double mu = i == 0 ? 0.25 : 0.5;
    const double sigma = std::sqrt(mu * (1.0 - mu) / draws);
    CHECK(std::abs(sums[i] / draws - mu) < 5.0 * sigma);
  }
}

TEST_CASE("exhausted corruption matches the stochastic draw") {
  CorruptionSchedule schedule;
  schedule.kind = CorruptionKind::FrontLoaded;
  schedule.budget = 10.0;
  schedule.magnitude = 1.0;
  const auto corrupted = LossModel::corrupted({0.25, 0.5, 0.5}, LossRange::ZeroOne, schedule);
  const auto clean = LossModel::stochastic({0.25, 0.5, 0.5}, LossRange::ZeroOne);
  Rng a(5);
  Rng b(5);
  for (std::size_t t = 1; t <= 200; ++t) {
    const auto x = corrupted.next_loss(t, a);
    const auto y = clean.next_loss(t, b);
    if (t > 10) CHECK(x.values == y.values);
  }
  CHECK(corrupted.corruption_spent(200) <= 10.0 + 1e-12);
  CHECK(corrupted.corruption_spent(200) == doctest::Approx(10.0));
}

TEST_CASE("zero budget corruption is the stochastic model") {
  CorruptionSchedule schedule;
  const auto corrupted = LossModel::corrupted({0.25, 0.5}, LossRange::ZeroOne, schedule);
  const auto clean = LossModel::stochastic({0.25, 0.5}, LossRange::ZeroOne);
  Rng a(9);
  Rng b(9);
  for (std::size_t t = 1; t <= 100; ++t) CHECK(corrupted.next_loss(t, a).values == clean.next_loss(t, b).values);
  CHECK(corrupted.corruption_spent(100) == 0.0);
}

TEST_CASE("explicit corruption spend") {
  CorruptionSchedule schedule;
  schedule.kind = CorruptionKind::Explicit;
  schedule.budget = 5.0;
  schedule.explicit_rounds.assign(50, {0.1, 0.0});
  const auto model = LossModel::corrupted({0.25, 0.5}, LossRange::ZeroOne, schedule);
  CHECK(model.corruption_spent(50) == doctest::Approx(5.0));
  CHECK(model.corruption_spent(25) == doctest::Approx(2.5));

  schedule.budget = 4.0;
  CHECK_THROWS(LossModel::corrupted({0.25, 0.5}, LossRange::ZeroOne, schedule));
}

TEST_CASE("corruption never exceeds the budget") {
  for (auto kind : {CorruptionKind::FrontLoaded, CorruptionKind::Periodic, CorruptionKind::TargetedBest}) {
    CorruptionSchedule schedule;
    schedule.kind = kind;
    schedule.budget = 37.5;
    schedule.magnitude = 0.7;
    schedule.period = 3;
    const auto model = LossModel::corrupted({0.25, 0.5, 0.5, 0.5}, LossRange::ZeroOne, schedule);
    CHECK(model.corruption_spent(1000) <= 37.5 + 1e-9);
  }
}

TEST_CASE("gap") {
  const auto two = LossModel::stochastic({0.25, 0.5}, LossRange::ZeroOne).gap();
  CHECK(two.gap == doctest::Approx(0.25));
  CHECK(two.best == 0);
  CHECK(LossModel::stochastic({0.1, 0.4, 0.9}, LossRange::ZeroOne).gap().gap == doctest::Approx(0.3));
  CHECK(LossModel::stochastic({0.2, 0.5, 0.5}, LossRange::ZeroOne).gap().gap == doctest::Approx(0.3));
  CHECK_THROWS(LossModel::stochastic({0.2, 0.2, 0.5}, LossRange::ZeroOne).gap());
  CHECK_THROWS(LossModel::alternating(3, 4, LossRange::ZeroOne).gap());
}

TEST_CASE("alternating losses favour one arm per doubling phase") {
  const auto model = LossModel::alternating(3, 2, LossRange::ZeroOne);
  Rng rng(1);
  auto favoured = [&](std::size_t t) {
    const auto v = model.next_loss(t, rng).values;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] == 0.0) return i;
    return v.size();
  };
  CHECK(favoured(1) == favoured(2));
  CHECK(favoured(3) != favoured(2));
  CHECK(favoured(3) == favoured(6));
  CHECK(favoured(7) != favoured(6));
}

TEST_CASE("linear means and noise range") {
  const auto model = LossModel::linear({{1.0, 0.0}, {0.0, 1.0}}, {0.5, -0.25}, 0.3);
  Rng rng(4);
  RoundLoss round;
  round.t = 1;
  const auto expected = model.expected_loss(model.next_loss(1, rng));
  CHECK(expected[0] == doctest::Approx(0.5));
  CHECK(expected[1] == doctest::Approx(-0.25));
  for (std::size_t t = 1; t <= 1000; ++t)
    for (double x : model.next_loss(t, rng).values) CHECK((x >= -1.0 && x <= 1.0));
}

TEST_CASE("same seed gives identical losses") {
  const auto model = LossModel::stochastic({0.25, 0.5, 0.5}, LossRange::MinusOneOne);
  Rng a(17);
  Rng b(17);
  for (std::size_t t = 1; t <= 100; ++t) CHECK(model.next_loss(t, a).values == model.next_loss(t, b).values);
}
