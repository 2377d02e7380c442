#include "bobw/design.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bobw {

Eigen::MatrixXd information_matrix(const ActionSet& actions, const std::vector<double>& weights) {
  if (actions.empty()) throw std::invalid_argument("empty action set");
  const auto d = actions.front().size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t i = 0; i < actions.size(); ++i)
    if (weights[i] > 0.0) m.noalias() += weights[i] * actions[i] * actions[i].transpose();
  return m;
}

double design_ridge(const Eigen::MatrixXd& m) { return 1e-12 * m.trace() / static_cast<double>(m.rows()); }

std::vector<double> leverages(const ActionSet& actions, const Eigen::MatrixXd& m) {
  Eigen::MatrixXd reg = m;
  reg.diagonal().array() += design_ridge(m);
  const Eigen::LDLT<Eigen::MatrixXd> solver(reg);
  std::vector<double> out;
  out.reserve(actions.size());
  for (const auto& a : actions) out.push_back(a.dot(solver.solve(a)));
  return out;
}

std::size_t action_rank(const ActionSet& actions) {
  if (actions.empty()) return 0;
  Eigen::MatrixXd stacked(actions.front().size(), static_cast<Eigen::Index>(actions.size()));
  for (std::size_t i = 0; i < actions.size(); ++i) stacked.col(static_cast<Eigen::Index>(i)) = actions[i];
  Eigen::FullPivLU<Eigen::MatrixXd> lu(stacked);
  lu.setThreshold(1e-10);
  return static_cast<std::size_t>(lu.rank());
}

ExplorationDesign john_exploration(const ActionSet& actions, double tolerance) {
  if (actions.empty()) throw std::invalid_argument("empty action set");
  const auto d = static_cast<std::size_t>(actions.front().size());
  for (const auto& a : actions) {
    if (static_cast<std::size_t>(a.size()) != d) throw std::invalid_argument("actions have inconsistent dimensions");
    if (!a.allFinite()) throw std::invalid_argument("action contains a non-finite entry");
  }
  if (!(tolerance > 0.0)) throw std::invalid_argument("design tolerance must be positive");
  const std::size_t rank = action_rank(actions);
  if (rank < d)
    throw std::invalid_argument("action set is rank deficient: spans " + std::to_string(rank) + " of " +
                                std::to_string(d) + " dimensions (deficiency " + std::to_string(d - rank) + ")");

  const auto n = actions.size();
  ExplorationDesign design;
  design.weights.assign(n, 1.0 / static_cast<double>(n));
  const double target = static_cast<double>(d) * (1.0 + tolerance);
  const double dim = static_cast<double>(d);
  for (int it = 0; it < 100000; ++it) {
    const auto lev = leverages(actions, information_matrix(actions, design.weights));
    const auto top = static_cast<std::size_t>(std::max_element(lev.begin(), lev.end()) - lev.begin());
    design.max_leverage = lev[top];
    design.iterations = it;
    if (lev[top] <= target) return design;
    // Exact line search for log det along e_top.
    const double step = (lev[top] / dim - 1.0) / (lev[top] - 1.0);
    for (auto& w : design.weights) w *= 1.0 - step;
    design.weights[top] += step;
  }
  throw std::runtime_error("G-optimal design did not reach the leverage target");
}

}  // namespace bobw
