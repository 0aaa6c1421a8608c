#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "uigp/gp.hpp"
#include "uigp/kernel.hpp"

// Test-side oracles, kept deliberately independent of the library's
// Cholesky-based code paths.

namespace test_oracles {

/// Multivariate normal log-density at y for covariance K, via dense inverse
/// and determinant (no Cholesky shortcuts).
inline double dense_mvn_logpdf(const Eigen::VectorXd& y, const Eigen::MatrixXd& cov) {
  const Eigen::MatrixXd inv = cov.inverse();
  const double det = cov.determinant();
  const double n = static_cast<double>(y.size());
  return -0.5 * y.dot(inv * y) - 0.5 * std::log(det) - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

/// Central finite differences of the log-marginal likelihood in log-space.
inline Eigen::VectorXd fd_lml_gradient(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                                       const uigp::KernelHyperparams& hp, double step = 1e-5) {
  const Eigen::VectorXd v0 = uigp::to_log_vector(hp);
  Eigen::VectorXd grad(v0.size());
  for (Eigen::Index k = 0; k < v0.size(); ++k) {
    Eigen::VectorXd vp = v0, vm = v0;
    vp[k] += step;
    vm[k] -= step;
    const double fp = uigp::log_marginal_likelihood(inputs, outputs, uigp::from_log_vector(vp));
    const double fm = uigp::log_marginal_likelihood(inputs, outputs, uigp::from_log_vector(vm));
    grad[k] = (fp - fm) / (2.0 * step);
  }
  return grad;
}

/// Mixed relative/absolute deviation used for gradient checks.
inline double rel_err(double actual, double expected) {
  return std::abs(actual - expected) / std::max(std::abs(expected), 1e-6);
}

/// Random 1-D dataset drawn from a GP with the given hyperparameters.
struct SyntheticGpData {
  Eigen::MatrixXd inputs;
  Eigen::VectorXd outputs;
};

inline SyntheticGpData draw_from_gp(int n, const uigp::KernelHyperparams& hp, double x_max,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, x_max);
  std::normal_distribution<double> normal(0.0, 1.0);

  SyntheticGpData data;
  data.inputs.resize(n, 1);
  for (int i = 0; i < n; ++i) data.inputs(i, 0) = unif(rng);

  Eigen::MatrixXd k = uigp::gram_matrix(data.inputs, data.inputs, hp, /*add_noise=*/true);
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i) z[i] = normal(rng);
  data.outputs = llt.matrixL() * z;
  return data;
}

/// Exact star discrepancy of a 1-D point set.
inline double star_discrepancy_1d(Eigen::VectorXd points) {
  std::sort(points.begin(), points.end());
  const double n = static_cast<double>(points.size());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < points.size(); ++i) {
    const double x = points[i];
    worst = std::max(worst, std::abs(static_cast<double>(i + 1) / n - x));
    worst = std::max(worst, std::abs(x - static_cast<double>(i) / n));
  }
  return worst;
}

}  // namespace test_oracles
