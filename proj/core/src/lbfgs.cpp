#include "lbfgs.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace uigp::detail {

namespace {

constexpr int kMemory = 10;
constexpr double kArmijoC1 = 1e-4;
constexpr int kMaxBacktracks = 50;

struct CurvaturePair {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho;
};

Eigen::VectorXd project(Eigen::VectorXd x, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

// Two-loop recursion for the L-BFGS search direction -H g. With empty
// memory this falls back to steepest descent capped at unit step length,
// which keeps the first move sane when the gradient is huge.
Eigen::VectorXd search_direction(const std::deque<CurvaturePair>& mem, const Eigen::VectorXd& grad) {
  if (mem.empty()) {
    const double norm = grad.norm();
    return norm > 1.0 ? Eigen::VectorXd(-grad / norm) : Eigen::VectorXd(-grad);
  }
  Eigen::VectorXd q = grad;
  std::vector<double> alpha(mem.size());
  for (int i = static_cast<int>(mem.size()) - 1; i >= 0; --i) {
    alpha[i] = mem[i].rho * mem[i].s.dot(q);
    q -= alpha[i] * mem[i].y;
  }
  const auto& last = mem.back();
  q *= last.s.dot(last.y) / last.y.squaredNorm();
  for (std::size_t i = 0; i < mem.size(); ++i) {
    const double beta = mem[i].rho * mem[i].y.dot(q);
    q += (alpha[i] - beta) * mem[i].s;
  }
  return -q;
}

}  // namespace

LbfgsResult lbfgs_minimize(const ValueAndGradient& objective, const Eigen::VectorXd& x0,
                           const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                           int max_iterations, double gradient_tolerance) {
  LbfgsResult res;
  res.x = project(x0, lower, upper);
  res.gradient.resize(x0.size());
  res.value = objective(res.x, res.gradient);
  if (!std::isfinite(res.value)) return res;  // infeasible start, nothing to do

  std::deque<CurvaturePair> mem;
  for (int it = 0; it < max_iterations; ++it) {
    res.iterations = it;
    if (res.gradient.norm() < gradient_tolerance) {
      res.converged = true;
      return res;
    }

    Eigen::VectorXd dir = search_direction(mem, res.gradient);
    double slope = dir.dot(res.gradient);
    if (!(slope < 0.0) || !dir.allFinite()) {  // not a descent direction, restart from steepest
      mem.clear();
      dir = -res.gradient;
      slope = dir.dot(res.gradient);
    }

    double step = 1.0;
    double f_trial = std::numeric_limits<double>::infinity();
    Eigen::VectorXd x_trial, g_trial(x0.size());
    bool accepted = false;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      x_trial = project(res.x + step * dir, lower, upper);
      const Eigen::VectorXd actual_step = x_trial - res.x;
      if (actual_step.norm() == 0.0) break;
      f_trial = objective(x_trial, g_trial);
      if (std::isfinite(f_trial) && f_trial <= res.value + kArmijoC1 * res.gradient.dot(actual_step)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return res;  // line search exhausted; keep the best point found

    const Eigen::VectorXd s = x_trial - res.x;
    const Eigen::VectorXd y = g_trial - res.gradient;
    const bool projected = ((res.x + step * dir) - x_trial).norm() > 0.0;
    const double sy = s.dot(y);
    if (projected) {
      mem.clear();
    } else if (sy > 1e-12 * s.norm() * y.norm()) {
      mem.push_back({s, y, 1.0 / sy});
      if (mem.size() > kMemory) mem.pop_front();
    }

    res.x = x_trial;
    res.value = f_trial;
    res.gradient = g_trial;
  }
  res.iterations = max_iterations;
  return res;
}

}  // namespace uigp::detail
