#include "bobw/simplex.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <sstream>

namespace bobw {

namespace {

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + " contains a non-finite entry");
}

// Conjugate coordinate map: x(p) = -psi'(p), and its inverse p(x).
struct CoordinateMap {
  const Regularizer& reg;

  double x_of(double p) const { return -reg.derivative(p); }

  double second_derivative(double p) const {
    return std::visit(
        [p](const auto& r) -> double {
          using R = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<R, NegEntropy>) return 1.0 / p;
          if constexpr (std::is_same_v<R, Tsallis>) return std::pow(p, r.exponent - 2.0);
          if constexpr (std::is_same_v<R, LogBarrier>) return 1.0 / (p * p);
          if constexpr (std::is_same_v<R, Hybrid>) {
            const double a = r.exponent;
            return r.tsallis_weight * a * std::pow(p, a - 2.0) + r.barrier_weight / (p * p);
          }
        },
        reg.kind());
  }

  double p_of(double x) const {
    return std::visit(
        [x](const auto& r) -> double {
          using R = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<R, NegEntropy>) return std::exp(-x - 1.0);
          if constexpr (std::is_same_v<R, Tsallis>) {
            if (x <= 0.0) return INFINITY;
            const double a = r.exponent;
            return std::pow((1.0 - a) * x, -1.0 / (1.0 - a));
          }
          if constexpr (std::is_same_v<R, LogBarrier>) return x <= 0.0 ? INFINITY : 1.0 / x;
          if constexpr (std::is_same_v<R, Hybrid>) {
            if (x <= 0.0) return INFINITY;
            const double a = r.exponent;
            const double w = r.tsallis_weight * a / (1.0 - a);
            const double bw = r.barrier_weight;
            // Solve w p^(a-1) + bw/p = x in u = ln p; h(u) is decreasing and convex,
            // so Newton from the left bound converges monotonically.
            double u = std::max(std::log(bw / x), std::log(w / x) / (1.0 - a));
            for (int it = 0; it < 100; ++it) {
              const double t1 = w * std::exp((a - 1.0) * u);
              const double t2 = bw * std::exp(-u);
              const double h = t1 + t2 - x;
              const double dh = (a - 1.0) * t1 - t2;
              const double step = h / dh;
              u -= step;
              if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(u))) break;
            }
            return std::exp(u);
          }
        },
        reg.kind());
  }
};

}  // namespace

Distribution::Distribution(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw std::invalid_argument("distribution must be nonempty");
  double total = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) throw std::invalid_argument("distribution weights must be finite and nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > kSimplexTolerance) {
    std::ostringstream msg;
    msg << "distribution weights sum to " << total << ", not 1";
    throw std::invalid_argument(msg.str());
  }
}

Distribution Distribution::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("distribution must be nonempty");
  return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Distribution Distribution::point_mass(std::size_t n, std::size_t index) {
  if (index >= n) throw std::invalid_argument("point mass index out of range");
  std::vector<double> w(n, 0.0);
  w[index] = 1.0;
  return Distribution(std::move(w));
}

std::size_t sample_weights(std::span<const double> weights, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last = i;
    acc += weights[i];
    if (u < acc) return i;
  }
  return last;
}

std::size_t sample(const Distribution& dist, Rng& rng) { return sample_weights(dist.weights(), rng); }

Regularizer Regularizer::neg_entropy() { return Regularizer(NegEntropy{}); }

Regularizer Regularizer::tsallis(double exponent) {
  if (!(exponent > 0.0 && exponent < 1.0)) throw std::invalid_argument("Tsallis exponent must lie in (0, 1)");
  return Regularizer(Tsallis{exponent});
}

Regularizer Regularizer::log_barrier() { return Regularizer(LogBarrier{}); }

Regularizer Regularizer::hybrid(double exponent, double tsallis_weight, double barrier_weight) {
  if (!(exponent > 0.0 && exponent < 1.0)) throw std::invalid_argument("hybrid exponent must lie in (0, 1)");
  if (!(tsallis_weight > 0.0) || !(barrier_weight > 0.0) || !std::isfinite(tsallis_weight) ||
      !std::isfinite(barrier_weight))
    throw std::invalid_argument("hybrid weights must be finite and strictly positive");
  return Regularizer(Hybrid{exponent, tsallis_weight, barrier_weight});
}

std::string Regularizer::name() const {
  return std::visit(
      [](const auto& r) -> std::string {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, NegEntropy>) return "neg-entropy";
        if constexpr (std::is_same_v<R, Tsallis>) return "tsallis(" + std::to_string(r.exponent) + ")";
        if constexpr (std::is_same_v<R, LogBarrier>) return "log-barrier";
        if constexpr (std::is_same_v<R, Hybrid>) return "hybrid(" + std::to_string(r.exponent) + ")";
      },
      kind_);
}

double Regularizer::value(double x) const {
  return std::visit(
      [x](const auto& r) -> double {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, NegEntropy>) return x > 0.0 ? x * std::log(x) : 0.0;
        if constexpr (std::is_same_v<R, Tsallis>) {
          const double a = r.exponent;
          return -std::pow(x, a) / (a * (1.0 - a));
        }
        if constexpr (std::is_same_v<R, LogBarrier>) return -std::log(x);
        if constexpr (std::is_same_v<R, Hybrid>) {
          const double a = r.exponent;
          return -r.tsallis_weight * std::pow(x, a) / (1.0 - a) - r.barrier_weight * std::log(x);
        }
      },
      kind_);
}

double Regularizer::derivative(double x) const {
  return std::visit(
      [x](const auto& r) -> double {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, NegEntropy>) return std::log(x) + 1.0;
        if constexpr (std::is_same_v<R, Tsallis>) return -std::pow(x, r.exponent - 1.0) / (1.0 - r.exponent);
        if constexpr (std::is_same_v<R, LogBarrier>) return -1.0 / x;
        if constexpr (std::is_same_v<R, Hybrid>) {
          const double a = r.exponent;
          return -r.tsallis_weight * a / (1.0 - a) * std::pow(x, a - 1.0) - r.barrier_weight / x;
        }
      },
      kind_);
}

double Regularizer::value(std::span<const double> p) const {
  double total = 0.0;
  for (double x : p) total += value(x);
  return total;
}

std::vector<double> CumulativeLoss::effective() const {
  std::vector<double> out = totals;
  if (!bonus.empty()) {
    if (bonus.size() != out.size()) throw std::invalid_argument("bonus dimension mismatch");
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bonus[i];
  }
  if (!prediction.empty()) {
    if (prediction.size() != out.size()) throw std::invalid_argument("prediction dimension mismatch");
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += prediction[i];
  }
  return out;
}

double kkt_residual(std::span<const double> cumulative, const Regularizer& reg, double scale,
                    std::span<const double> p, double floor) {
  const double shift = *std::min_element(cumulative.begin(), cumulative.end());
  std::vector<double> grad;
  std::vector<double> mag;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= floor * (1.0 + 1e-12) && floor > 0.0) continue;
    const double curvature = reg.derivative(p[i]) / scale;
    grad.push_back((cumulative[i] - shift) + curvature);
    mag.push_back(1.0 + std::abs(cumulative[i] - shift) + std::abs(curvature));
  }
  if (grad.empty()) return 0.0;
  const double mean = std::accumulate(grad.begin(), grad.end(), 0.0) / static_cast<double>(grad.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < grad.size(); ++i) worst = std::max(worst, std::abs(grad[i] - mean) / mag[i]);
  return worst;
}

FtrlSolution ftrl_solve(std::span<const double> cumulative, const Regularizer& reg, double scale, double floor) {
  const std::size_t n = cumulative.size();
  if (n == 0) throw std::invalid_argument("ftrl_argmin needs at least one coordinate");
  require_finite(cumulative, "cumulative loss");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("ftrl scale must be finite and positive");
  if (!(floor >= 0.0) || floor * static_cast<double>(n) > 1.0)
    throw std::invalid_argument("ftrl floor must lie in [0, 1/n]");

  FtrlSolution sol;
  if (n == 1) {
    sol.dist = Distribution({1.0});
    return sol;
  }

  const double shift = *std::min_element(cumulative.begin(), cumulative.end());
  std::vector<double> loss(n);
  for (std::size_t i = 0; i < n; ++i) loss[i] = cumulative[i] - shift;

  const CoordinateMap map{reg};
  std::vector<double> p(n);
  std::vector<bool> free(n);

  // Stationarity: x(p_i) = scale (L_i + lambda); the mass is decreasing in lambda.
  auto mass = [&](double lambda, double* slope) {
    double total = 0.0;
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double pi = map.p_of(scale * (loss[i] + lambda));
      if (pi > floor) {
        p[i] = pi;
        free[i] = true;
        if (std::isfinite(pi)) d -= scale / map.second_derivative(pi);
      } else {
        p[i] = floor;
        free[i] = false;
      }
      total += p[i];
    }
    if (slope) *slope = d;
    return total - 1.0;
  };

  double lo = map.x_of(1.0) / scale;
  double hi = map.x_of(1.0 / static_cast<double>(n)) / scale;
  if (hi < lo) std::swap(lo, hi);
  double lambda = 0.5 * (lo + hi);
  double excess = 0.0;
  int it = 0;
  for (; it < 200; ++it) {
    double slope = 0.0;
    excess = mass(lambda, &slope);
    if (std::abs(excess) <= 1e-15) break;
    if (excess > 0.0) lo = lambda; else hi = lambda;
    double next = (slope < 0.0 && std::isfinite(excess)) ? lambda - excess / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == lambda || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(lambda))) {
      lambda = next;
      excess = mass(lambda, nullptr);
      break;
    }
    lambda = next;
  }
  if (!std::isfinite(excess) || std::abs(excess) > 1e-10) {
    std::ostringstream msg;
    msg << "ftrl_argmin did not converge after " << it << " iterations (residual " << excess << ")";
    throw SolverError(msg.str(), excess);
  }

  // Spread the remaining rounding error over free coordinates proportionally.
  double free_mass = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (free[i]) free_mass += p[i];
  if (free_mass > 0.0) {
    const double target = free_mass - excess;
    for (std::size_t i = 0; i < n; ++i)
      if (free[i]) p[i] *= target / free_mass;
  }

  sol.multiplier = lambda - shift;
  sol.iterations = it;
  sol.kkt_residual = kkt_residual(cumulative, reg, scale, p, floor);
  if (!(sol.kkt_residual <= 1e-8)) {
    std::ostringstream msg;
    msg << "ftrl_argmin KKT residual " << sol.kkt_residual << " exceeds 1e-8";
    throw SolverError(msg.str(), sol.kkt_residual);
  }
  sol.dist = Distribution(std::move(p));
  return sol;
}

Distribution ftrl_argmin(std::span<const double> cumulative, const Regularizer& reg, double scale, double floor) {
  return ftrl_solve(cumulative, reg, scale, floor).dist;
}

Distribution ftrl_argmin(const CumulativeLoss& cumulative, const Regularizer& reg, double scale, double floor) {
  const auto eff = cumulative.effective();
  return ftrl_solve(eff, reg, scale, floor).dist;
}

double bregman(const Regularizer& reg, std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("bregman dimension mismatch");
  require_finite(p, "p");
  require_finite(q, "q");
  const bool interior_p = !reg.is_tsallis();
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(q[i] > 0.0) || (interior_p ? !(p[i] > 0.0) : p[i] < 0.0))
      throw std::invalid_argument("bregman requires strictly positive arguments for " + reg.name());
    const double r = p[i] / q[i];
    if (reg.is_neg_entropy()) {
      total += p[i] * std::log(r) - p[i] + q[i];
    } else if (reg.is_log_barrier()) {
      total += r - 1.0 - std::log(r);
    } else {
      total += reg.value(p[i]) - reg.value(q[i]) - reg.derivative(q[i]) * (p[i] - q[i]);
    }
  }
  return std::max(total, 0.0);
}

StabilityBound stability_bound(const Regularizer& reg, std::span<const double> p, std::span<const double> loss,
                               double scale) {
  if (p.size() != loss.size()) throw std::invalid_argument("stability_bound dimension mismatch");
  require_finite(p, "p");
  require_finite(loss, "loss");
  if (!(scale > 0.0)) throw std::invalid_argument("stability_bound scale must be positive");
  for (double x : p)
    if (!(x > 0.0)) throw std::invalid_argument("stability_bound requires p strictly positive");

  StabilityBound out{0.0, 0.0, ""};
  const bool nonnegative = std::all_of(loss.begin(), loss.end(), [](double l) { return l >= 0.0; });

  if (reg.is_neg_entropy()) {
    if (nonnegative) {
      out.lemma = "negentropy-nonnegative";
      for (std::size_t i = 0; i < p.size(); ++i) out.rhs += 0.5 * scale * p[i] * loss[i] * loss[i];
    } else {
      for (double l : loss)
        if (!(scale * l > -1.0)) throw std::invalid_argument("negentropy stability requires loss_i > -1/scale");
      out.lemma = "negentropy-signed";
      for (std::size_t i = 0; i < p.size(); ++i) out.rhs += scale * p[i] * loss[i] * loss[i];
    }
  } else if (reg.is_tsallis()) {
    if (!nonnegative) throw std::invalid_argument("Tsallis stability requires loss_i >= 0");
    const double a = std::get<Tsallis>(reg.kind()).exponent;
    out.lemma = "tsallis-nonnegative";
    for (std::size_t i = 0; i < p.size(); ++i) out.rhs += 0.5 * scale * std::pow(p[i], 2.0 - a) * loss[i] * loss[i];
  } else if (reg.is_log_barrier()) {
    for (std::size_t i = 0; i < p.size(); ++i)
      if (!(scale * p[i] * loss[i] >= -0.5))
        throw std::invalid_argument("log-barrier stability requires scale * p_i * loss_i >= -1/2");
    out.lemma = "log-barrier";
    for (std::size_t i = 0; i < p.size(); ++i) out.rhs += scale * p[i] * p[i] * loss[i] * loss[i];
  } else {
    throw std::invalid_argument("no stability lemma for " + reg.name());
  }

  // The maximizer solves psi'(x) = psi'(p) - scale * loss, i.e. x = p_of(x_of(p) + scale * loss).
  const CoordinateMap map{reg};
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double x = map.p_of(map.x_of(p[i]) + scale * loss[i]);
    const double gain = (p[i] - x) * loss[i];
    double divergence = 0.0;
    const double r = x / p[i];
    if (reg.is_neg_entropy()) divergence = x * std::log(r) - x + p[i];
    else if (reg.is_log_barrier()) divergence = r - 1.0 - std::log(r);
    else divergence = reg.value(x) - reg.value(p[i]) - reg.derivative(p[i]) * (x - p[i]);
    out.lhs += gain - divergence / scale;
  }
  return out;
}

}  // namespace bobw
