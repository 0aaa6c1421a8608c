#pragma once

#include <Eigen/Dense>
#include <functional>

namespace uigp::detail {

/// Objective callback: returns f(x) and writes the gradient. May return a
/// non-finite value to mark an infeasible point; the line search backs off.
using ValueAndGradient = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct LbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd gradient;
  int iterations = 0;
  bool converged = false;  // gradient norm fell below tolerance
};

/// Box-constrained L-BFGS minimization with Armijo backtracking. Iterates
/// are projected onto [lower, upper] after each step; the memory is reset
/// whenever the projection becomes active, which keeps the curvature pairs
/// consistent. Fully deterministic.
LbfgsResult lbfgs_minimize(const ValueAndGradient& objective, const Eigen::VectorXd& x0,
                           const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                           int max_iterations, double gradient_tolerance);

}  // namespace uigp::detail
