#include <cmath>
#include <vector>

#include "doctest.h"

#include "bobw/simplex.hpp"

using namespace bobw;

namespace {

// Coordinate-wise max over x >= 0 of (p - x) l - D(x, p) / scale, by dense grid.
double grid_stability_lhs(const Regularizer& reg, const std::vector<double>& p, const std::vector<double>& loss,
                          double scale, double upper, int points) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double best = 0.0;
    for (int k = 1; k <= points; ++k) {
      const double x = upper * k / points;
      const double d = reg.value(x) - reg.value(p[i]) - reg.derivative(p[i]) * (x - p[i]);
      best = std::max(best, (p[i] - x) * loss[i] - d / scale);
    }
    total += best;
  }
  return total;
}

}  // namespace

TEST_CASE("distribution validation") {
  CHECK_NOTHROW(Distribution({0.25, 0.75}));
  CHECK_THROWS(Distribution({0.5, 0.6}));
  CHECK_THROWS(Distribution({-0.1, 1.1}));
  CHECK_THROWS(Distribution(std::vector<double>{}));
  CHECK(Distribution::uniform(4)[3] == doctest::Approx(0.25));
  CHECK(Distribution::point_mass(3, 1)[1] == 1.0);
}

TEST_CASE("negentropy argmin") {
  const auto even = ftrl_argmin(std::vector<double>{0.0, 0.0}, Regularizer::neg_entropy(), 1.0);
  CHECK(even[0] == doctest::Approx(0.5).epsilon(1e-12));
  const auto skew = ftrl_argmin(std::vector<double>{0.0, std::log(3.0)}, Regularizer::neg_entropy(), 1.0);
  CHECK(skew[0] == doctest::Approx(0.75).epsilon(1e-10));
  CHECK(skew[1] == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("log-barrier argmin matches grid search") {
  const std::vector<double> cum{1.0, 0.0};
  const auto p = ftrl_argmin(cum, Regularizer::log_barrier(), 1.0);
  double best_x = 0.0;
  double best_value = INFINITY;
  for (int k = 1; k < 1000000; ++k) {
    const double x = k * 1e-6;
    const double value = x * cum[0] + (1.0 - x) * cum[1] - std::log(x) - std::log(1.0 - x);
    if (value < best_value) {
      best_value = value;
      best_x = x;
    }
  }
  CHECK(std::abs(p[0] - best_x) < 2e-6);
}

TEST_CASE("argmin is translation invariant and satisfies KKT") {
  const std::vector<Regularizer> regs{Regularizer::neg_entropy(), Regularizer::tsallis(0.5), Regularizer::log_barrier(),
                                      Regularizer::hybrid(0.5, 3.0, 2.0)};
  const std::vector<double> cum{0.3, -1.2, 2.5, 0.0};
  std::vector<double> shifted = cum;
  for (auto& x : shifted) x += 100.0;
  for (const auto& reg : regs) {
    CAPTURE(reg.name());
    const auto sol = ftrl_solve(cum, reg, 0.7);
    CHECK(sol.kkt_residual <= 1e-8);
    const auto moved = ftrl_argmin(shifted, reg, 0.7);
    for (std::size_t i = 0; i < cum.size(); ++i) CHECK(sol.dist[i] == doctest::Approx(moved[i]).epsilon(1e-8));
  }
}

TEST_CASE("argmin respects the floor") {
  const auto p = ftrl_argmin(std::vector<double>{0.0, 50.0, 50.0}, Regularizer::neg_entropy(), 1.0, 0.01);
  CHECK(p[1] >= 0.01 - 1e-12);
  CHECK(p[2] >= 0.01 - 1e-12);
}

TEST_CASE("argmin rejects bad input") {
  CHECK_THROWS(ftrl_argmin(std::vector<double>{0.0, NAN}, Regularizer::neg_entropy(), 1.0));
  CHECK_THROWS(ftrl_argmin(std::vector<double>{0.0, 1.0}, Regularizer::neg_entropy(), 0.0));
}

TEST_CASE("bregman worked values") {
  const std::vector<double> half{0.5, 0.5};
  CHECK(bregman(Regularizer::neg_entropy(), half, half) == doctest::Approx(0.0));
  CHECK(bregman(Regularizer::neg_entropy(), half, std::vector<double>{0.75, 0.25}) ==
        doctest::Approx(0.5 * std::log(4.0 / 3.0)).epsilon(1e-12));
  const auto h = [](double x) { return x - 1.0 - std::log(x); };
  CHECK(bregman(Regularizer::log_barrier(), half, std::vector<double>{0.25, 0.75}) ==
        doctest::Approx(h(2.0) + h(2.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("stability bound worked values") {
  const std::vector<double> uniform{0.5, 0.5};
  const auto zero = stability_bound(Regularizer::neg_entropy(), uniform, std::vector<double>{0.0, 0.0}, 0.1);
  CHECK(zero.lhs == doctest::Approx(0.0));
  CHECK(zero.rhs == doctest::Approx(0.0));

  const std::vector<double> unit{1.0, 0.0};
  const auto neg = stability_bound(Regularizer::neg_entropy(), uniform, unit, 0.1);
  CHECK(neg.rhs == doctest::Approx(0.05 * 0.5));
  CHECK(neg.lhs <= neg.rhs);
  CHECK(neg.lhs == doctest::Approx(grid_stability_lhs(Regularizer::neg_entropy(), uniform, unit, 0.1, 1.0, 200000))
                       .epsilon(1e-6));

  const std::vector<double> p{0.9, 0.1};
  const std::vector<double> loss{0.0, 2.0};
  const auto ts = stability_bound(Regularizer::tsallis(0.5), p, loss, 0.05);
  CHECK(ts.rhs == doctest::Approx(0.025 * std::pow(0.1, 1.5) * 4.0));
  CHECK(ts.lhs <= ts.rhs);
  CHECK(ts.lhs ==
        doctest::Approx(grid_stability_lhs(Regularizer::tsallis(0.5), p, loss, 0.05, 1.0, 200000)).epsilon(1e-5));
}

TEST_CASE("stability bound rejects broken preconditions") {
  const std::vector<double> p{0.5, 0.5};
  CHECK_THROWS(stability_bound(Regularizer::tsallis(0.5), p, std::vector<double>{-1.0, 0.0}, 0.1));
  CHECK_THROWS(stability_bound(Regularizer::log_barrier(), p, std::vector<double>{-10.0, 0.0}, 1.0));
}

TEST_CASE("sampling") {
  Rng rng(7);
  CHECK(sample(Distribution::point_mass(4, 2), rng) == 2);

  std::vector<int> counts(4, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[sample(Distribution::uniform(4), rng)];
  const double sigma = std::sqrt(draws * 0.25 * 0.75);
  for (int c : counts) CHECK(std::abs(c - draws * 0.25) < 5.0 * sigma);

  const Distribution d({0.1, 0.2, 0.7});
  Rng a(11);
  Rng b(11);
  for (int i = 0; i < 100; ++i) CHECK(sample(d, a) == sample(d, b));
}
