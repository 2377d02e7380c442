#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"

#include "bobw/harness.hpp"
#include "bobw/invariants.hpp"

using namespace bobw;

namespace {

ExperimentConfig small_mab(Stack stack, std::size_t horizon) {
  ExperimentConfig c;
  c.setting = Setting::Mab;
  c.stack = stack;
  c.arms = 3;
  c.gap = 0.25;
  c.horizon = horizon;
  c.seeds = {1, 2, 3};
  c.audit = AuditPolicy::Record;
  return c;
}

std::string records_csv(const ExperimentConfig& c) {
  const auto result = run_experiment(c);
  std::ostringstream out;
  write_records_csv(out, c, result.runs);
  return out.str();
}

}  // namespace

TEST_CASE("pseudo regret") {
  const std::vector<std::vector<double>> means(10, {0.25, 0.5});
  CHECK(pseudo_regret(std::vector<std::size_t>(10, 0), means).back() == 0.0);
  CHECK(pseudo_regret(std::vector<std::size_t>(10, 1), means).back() == doctest::Approx(2.5));

  // Scripted rounds (0, 1) then (1, 0.5): arm 0 totals 1.0 against 1.5, so playing 0 then 1 gives
  // 0 after round one and (0.5 - 1) = -0.5 after round two.
  const std::vector<std::vector<double>> scripted{{0.0, 1.0}, {1.0, 0.5}};
  const auto curve = pseudo_regret({0, 1}, scripted);
  CHECK(curve[0] == doctest::Approx(0.0));
  CHECK(curve[1] == doctest::Approx(-0.5));
}

TEST_CASE("checkpoint grid") {
  CHECK(checkpoints(1) == std::vector<std::size_t>{1});
  CHECK(checkpoints(64) == std::vector<std::size_t>{16, 32, 64});
  CHECK(checkpoints(100) == std::vector<std::size_t>{16, 32, 64, 100});
}

TEST_CASE("slope fits") {
  std::vector<std::pair<double, double>> log_curve;
  std::vector<std::pair<double, double>> sqrt_curve;
  std::vector<std::pair<double, double>> noisy;
  Rng rng(2);
  for (std::size_t t = 16; t <= 65536; t *= 2) {
    const double x = static_cast<double>(t);
    log_curve.emplace_back(x, 5.0 * std::log(x));
    sqrt_curve.emplace_back(x, 3.0 * std::sqrt(x));
    noisy.emplace_back(x, 5.0 * std::log(x) + (2.0 * uniform01(rng) - 1.0));
  }
  const auto log_fit = slope_fit(log_curve);
  CHECK(log_fit.log_coefficient == doctest::Approx(5.0).epsilon(1e-8));
  CHECK(log_fit.log_r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(slope_fit(sqrt_curve).sqrt_coefficient == doctest::Approx(3.0).epsilon(1e-8));
  const auto noisy_fit = slope_fit(noisy);
  CHECK(noisy_fit.log_r2 > noisy_fit.sqrt_r2);

  CHECK(stochastic_verdict(log_curve).passes);
  CHECK_FALSE(stochastic_verdict(sqrt_curve).passes);

  auto shuffled = log_curve;
  std::swap(shuffled[3], shuffled[4]);
  CHECK_THROWS(slope_fit(shuffled));
  std::vector<std::pair<double, double>> narrow(log_curve.begin(), log_curve.begin() + 5);
  CHECK_THROWS(slope_fit(narrow));
}

TEST_CASE("single-round experiment") {
  for (auto stack : {Stack::BaseOnly, Stack::BaseCorral, Stack::Full}) {
    auto c = small_mab(stack, 1);
    const auto result = run_experiment(c);
    for (const auto& run : result.runs) {
      REQUIRE(run.records.size() == 1);
      CHECK(run.records[0].pseudo_regret >= -2.0);
      CHECK(run.records[0].pseudo_regret <= 2.0);
    }
  }
}

TEST_CASE("zero-gap model is rejected before running") {
  auto c = small_mab(Stack::Full, 100);
  c.means = {0.5, 0.5, 0.7};
  CHECK_THROWS_AS(run_experiment(c), std::invalid_argument);
}

TEST_CASE("identical seeds give identical csv") {
  for (auto setting : {Setting::Mab, Setting::Linear, Setting::Contextual, Setting::GraphStrong, Setting::GraphWeak}) {
    auto c = small_mab(Stack::Full, 512);
    c.setting = setting;
    if (setting == Setting::GraphWeak) c.stack = Stack::BaseCorral;
    CAPTURE(to_string(setting));
    CHECK(records_csv(c) == records_csv(c));
  }
}

TEST_CASE("csv header") {
  auto c = small_mab(Stack::Full, 32);
  const auto csv = records_csv(c);
  CHECK(csv.substr(0, csv.find('\n')) == "seed,t,pseudo_regret,one_minus_p_best,candidate,setting,stack");
}

TEST_CASE("mean curve lies inside the per-seed envelope") {
  auto c = small_mab(Stack::Full, 1024);
  const auto result = run_experiment(c);
  for (const auto& row : result.summary) {
    CHECK(row.mean >= row.min - 1e-12);
    CHECK(row.mean <= row.max + 1e-12);
    CHECK(row.q25 <= row.q75);
  }
}

TEST_CASE("config json round trip") {
  auto c = small_mab(Stack::BaseCorral, 2048);
  c.regime = Regime::Corrupted;
  c.corruption_budget = 64.0;
  c.corral = CorralChoice::DataDependentSecond;
  const auto back = config_from_json(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK_THROWS(config_from_json(nlohmann::json{{"setting", "nonsense"}}));
}

TEST_CASE("records csv reads back") {
  auto c = small_mab(Stack::Full, 256);
  std::istringstream in(records_csv(c));
  const auto curves = read_records_csv(in);
  REQUIRE(curves.size() == 3);
  CHECK(curves[0].second.size() == checkpoints(256).size());
}

TEST_CASE("frozen update probabilities") {
  LogBarrierMab base(3, std::nullopt, 256);
  const auto model = LossModel::stochastic({0.5, 0.25, 0.5}, LossRange::ZeroOne);
  const std::vector<double> q(256, 0.5);
  const auto points = run_iw_base(base, model, FeedbackModel::bandit(), q, 1);
  REQUIRE_FALSE(points.empty());
  CHECK(points.back().t == 256);
  CHECK(points.back().inv_q_sum == doctest::Approx(512.0));
  CHECK(points.back().min_q == doctest::Approx(0.5));
}

TEST_CASE("invariant suites") {
  CHECK(check_invariants({"unbiasedness"}).failures() == 0);
  CHECK(check_invariants({"negative-control"}).failures() == 0);
  CHECK(stability_suite(500).failures() == 0);
  CHECK(graph_suite(3, 10, 7).failures() == 0);
}

TEST_CASE("corruption budget outside the corrupted regime is rejected") {
  auto c = small_mab(Stack::Full, 64);
  c.corruption_budget = 10.0;
  CHECK_THROWS_AS(prepare_setup(c), std::invalid_argument);
  c.regime = Regime::Corrupted;
  CHECK_NOTHROW(prepare_setup(c));
}
