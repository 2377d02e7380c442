#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace bobw {

using ActionSet = std::vector<Eigen::VectorXd>;

struct ExplorationDesign {
  std::vector<double> weights;
  double max_leverage = 0.0;
  int iterations = 0;
};

// sum_a w_a a a^T
Eigen::MatrixXd information_matrix(const ActionSet& actions, const std::vector<double>& weights);

// Ridge added before inversion: 1e-12 * tr(M) / d.
double design_ridge(const Eigen::MatrixXd& m);

// a^T M^{-1} a for every action.
std::vector<double> leverages(const ActionSet& actions, const Eigen::MatrixXd& m);

// G-optimal design by Frank-Wolfe on log det M(w), stopped once every leverage is at most
// d (1 + tolerance). Throws if the actions do not span R^d.
ExplorationDesign john_exploration(const ActionSet& actions, double tolerance = 0.1);

std::size_t action_rank(const ActionSet& actions);

}  // namespace bobw
