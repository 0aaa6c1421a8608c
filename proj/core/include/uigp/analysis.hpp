#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "uigp/input_prior.hpp"
#include "uigp/prediction.hpp"

namespace uigp {

/// Error metrics before and after inference of the uncertain locations.
/// Reductions are (prior - posterior) / prior * 100 and go negative when
/// inference made things worse.
struct ErrorReport {
  double input_mse_prior = 0.0;
  double input_mse_posterior = 0.0;
  double mspe_prior = 0.0;
  double mspe_posterior = 0.0;
  double relative_reduction_inputs = 0.0;
  double relative_reduction_mspe = 0.0;
};

/// Mean squared location error under the prior, in closed form:
/// (1/N_u) sum_ij [(mean_ij - truth_ij)^2 + std_ij^2]. Setting
/// include_prior_variance = false drops the variance term and reports pure
/// mean displacement (diagnostic only).
double input_mse(const InputPrior& prior, const Eigen::MatrixXd& truth,
                 bool include_prior_variance = true);

/// Mean squared location error averaged over posterior samples:
/// (1/N_u) avg_s ||sample_s - truth||_F^2.
double input_mse(const std::vector<Eigen::MatrixXd>& samples, const Eigen::MatrixXd& truth);

/// Mean squared prediction error against the ground-truth function values,
/// with the inner expectation over the GP taken analytically per sample:
/// (1/(N_test S)) sum_s sum_t [(mean_st - truth_t)^2 + var_st].
double mspe(const Eigen::MatrixXd& per_sample_means, const Eigen::MatrixXd& per_sample_variances,
            const Eigen::VectorXd& truth_values);
double mspe(const PredictiveSummary& summary, const Eigen::VectorXd& truth_values);

/// Silverman's rule: 1.06 * min(std, IQR/1.34) * n^(-1/5).
/// Throws DegenerateBandwidthError when that collapses to zero.
double silverman_bandwidth(const Eigen::VectorXd& samples);

/// Gaussian-kernel density estimate evaluated on a grid. Without an explicit
/// bandwidth, Silverman's rule is used (needs n >= 2).
Eigen::VectorXd kde_density(const Eigen::VectorXd& samples, const Eigen::VectorXd& grid,
                            std::optional<double> bandwidth = std::nullopt);

/// 100 * (prior_err - post_err) / prior_err; requires prior_err > 0.
double relative_reduction(double prior_err, double post_err);

/// JSON object with exactly the six ErrorReport fields.
std::string to_json(const ErrorReport& report);

}  // namespace uigp
