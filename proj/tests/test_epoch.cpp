#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"

#include "bobw/epoch.hpp"

using namespace bobw;

namespace {

// Always plays one fixed action; reports a chosen c2.
class FixedLearner final : public Learner {
 public:
  FixedLearner(std::size_t actions, std::size_t action, double c2) : actions_(actions), action_(action), c2_(c2) {}
  std::string name() const override { return "fixed"; }
  std::size_t num_actions() const override { return actions_; }
  std::size_t act(std::size_t t, int, Rng&) override {
    last_t = t;
    return action_;
  }
  void observe(const Observation&) override {}
  std::vector<double> action_distribution() const override {
    std::vector<double> p(actions_, 0.0);
    p[action_] = 1.0;
    return p;
  }
  SelfBoundingMeta meta() const override { return {1.0, 1.0, c2_, 0.5}; }
  std::size_t last_t = 0;

 private:
  std::size_t actions_;
  std::size_t action_;
  double c2_;
};

RoundLoss zero_round(std::size_t t, std::size_t n) {
  RoundLoss r;
  r.t = t;
  r.values.assign(n, 0.0);
  return r;
}

}  // namespace

TEST_CASE("switch rule") {
  std::vector<std::size_t> counts{0, 5, 0, 0};
  CHECK(EpochReduction::switch_target(12.0, 4.0, 0.0, 0, counts) == std::optional<std::size_t>{1});
  CHECK_FALSE(EpochReduction::switch_target(11.0, 4.0, 0.0, 0, counts).has_value());
  std::vector<std::size_t> only_candidate{8, 0, 0, 0};
  CHECK_FALSE(EpochReduction::switch_target(12.0, 4.0, 0.0, 0, only_candidate).has_value());
  std::vector<std::size_t> tie{0, 4, 4, 0};
  CHECK(EpochReduction::switch_target(12.0, 4.0, 0.0, 0, tie) == std::optional<std::size_t>{1});
}

TEST_CASE("initial offset delays the first switch") {
  const std::size_t n = 3;
  EpochReduction epoch([&](std::size_t cand) { return std::make_unique<FixedLearner>(n, (cand + 1) % n, 2.0); }, n,
                       1024, 42);
  CHECK(epoch.previous_start() == doctest::Approx(-2.0 * std::log(1024.0)));
  CHECK(epoch.previous_start() == doctest::Approx(-13.863).epsilon(1e-4));
  const auto first = *epoch.candidate();
  Rng unused(0);
  const auto feedback = FeedbackModel::bandit();
  std::size_t switched_at = 0;
  for (std::size_t t = 1; t <= 100 && switched_at == 0; ++t) {
    const auto a = epoch.act(t, -1, unused);
    epoch.observe(feedback.observe(zero_round(t, n), a));
    if (!epoch.switches().empty()) switched_at = t;
  }
  CHECK(switched_at == 28);
  CHECK(epoch.switches().front().old_candidate == first);
  CHECK(epoch.switches().front().new_candidate == (first + 1) % n);
  CHECK(epoch.epoch_start() == 28.0);
}

TEST_CASE("a learner that only plays its candidate never switches") {
  const std::size_t n = 4;
  EpochReduction epoch([&](std::size_t cand) { return std::make_unique<FixedLearner>(n, cand, 1.0); }, n, 4096, 7);
  Rng unused(0);
  const auto feedback = FeedbackModel::bandit();
  for (std::size_t t = 1; t <= 4096; ++t) epoch.observe(feedback.observe(zero_round(t, n), epoch.act(t, -1, unused)));
  CHECK(epoch.switches().empty());
  CHECK(epoch.epoch() == 1);
}

TEST_CASE("inner learner sees local time") {
  const std::size_t n = 2;
  FixedLearner* current = nullptr;
  EpochReduction epoch(
      [&](std::size_t cand) {
        auto l = std::make_unique<FixedLearner>(n, 1 - cand, 1.0);
        current = l.get();
        return l;
      },
      n, 64, 3);
  Rng unused(0);
  const auto feedback = FeedbackModel::bandit();
  for (std::size_t t = 1; t <= 40; ++t) {
    const auto a = epoch.act(t, -1, unused);
    CHECK(current->last_t == t - static_cast<std::size_t>(epoch.epoch_start()));
    epoch.observe(feedback.observe(zero_round(t, n), a));
  }
  CHECK(epoch.switches().size() >= 1);
}

TEST_CASE("initial candidate") {
  EpochReduction single([](std::size_t c) { return std::make_unique<FixedLearner>(1, c, 1.0); }, 1, 16, 5);
  CHECK(*single.candidate() == 0);

  const int seeds = 10000;
  std::vector<int> counts(4, 0);
  for (int s = 0; s < seeds; ++s) {
    EpochReduction e([](std::size_t c) { return std::make_unique<FixedLearner>(4, c, 1.0); }, 4, 16,
                     static_cast<std::uint64_t>(s));
    ++counts[*e.candidate()];
  }
  const double sigma = std::sqrt(seeds * 0.25 * 0.75);
  for (int c : counts) CHECK(std::abs(c - seeds * 0.25) < 5.0 * sigma);

  EpochReduction a([](std::size_t c) { return std::make_unique<FixedLearner>(4, c, 1.0); }, 4, 16, 99);
  EpochReduction b([](std::size_t c) { return std::make_unique<FixedLearner>(4, c, 1.0); }, 4, 16, 99);
  CHECK(a.candidate() == b.candidate());
}

TEST_CASE("self-bounding envelope") {
  CHECK(gsb_envelope(1.0, 1.0, 3.0, 0.5, 50.0, 0.0) == doctest::Approx(3.0 * std::log(50.0)));
  CHECK(gsb_envelope(1.0, 1.0, 0.0, 0.5, 100.0, 25.0) == doctest::Approx(10.0));
  CHECK(std::sqrt(std::log(100.0) * 25.0) == doctest::Approx(10.73).epsilon(1e-3));
}
