#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "uigp/input_prior.hpp"
#include "uigp/kernel.hpp"

namespace uigp {

/// The two kinds of observations handled here: pairs with fixed, exactly
/// known inputs, and outputs whose input locations are known only through an
/// InputPrior. Either side may be empty, but not both.
struct TrainingData {
  Eigen::MatrixXd fixed_inputs;       // N_f x d
  Eigen::VectorXd fixed_outputs;      // N_f
  Eigen::VectorXd uncertain_outputs;  // N_u
  InputPrior input_prior;             // priors for the N_u uncertain locations

  Eigen::Index n_fixed() const { return fixed_inputs.rows(); }
  Eigen::Index n_uncertain() const { return uncertain_outputs.size(); }
  Eigen::Index dim() const { return n_fixed() > 0 ? fixed_inputs.cols() : input_prior.dim(); }

  void validate() const;

  /// [X^f; candidate] stacked, fixed block first.
  Eigen::MatrixXd stacked_inputs(const Eigen::MatrixXd& candidate) const;
  /// [y_fixed; y_uncertain] stacked in the same order.
  Eigen::VectorXd stacked_outputs() const;
  /// Surrogate inputs with every uncertain location replaced by its prior mean.
  Eigen::MatrixXd surrogate_inputs() const;
};

/// Precomputed state for exact GP predictions on one realization of the
/// training inputs. cholesky_factor is the lower factor L of
/// K + sigma_n^2 I + jitter I, and alpha solves (K + sigma_n^2 I + jitter I) alpha = y.
struct FittedGP {
  Eigen::MatrixXd training_inputs;
  Eigen::VectorXd training_outputs;
  KernelHyperparams hyperparams;
  Eigen::MatrixXd cholesky_factor;
  Eigen::VectorXd alpha;
  double jitter = 0.0;
};

struct GpPrediction {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;  // clamped at zero; see negative_variance_clamps()
};

/// -1/2 y^T (K + sn2 I)^-1 y - 1/2 log|K + sn2 I| - n/2 log 2pi, evaluated
/// through the Cholesky factor of the jittered matrix.
/// Throws IllConditionedKernelError if factorization fails even with jitter.
double log_marginal_likelihood(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                               const KernelHyperparams& hp);

/// Gradient of log_marginal_likelihood with respect to the log-space
/// parameter vector [log sf2, log l_1..l_d, log sn2].
Eigen::VectorXd lml_gradient(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                             const KernelHyperparams& hp);

FittedGP gp_fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                const KernelHyperparams& hp);

/// Exact predictive moments at each test point:
///   mean = k(x*, X) (K + sn2 I)^-1 y
///   var  = k(x*, x*) - k(x*, X) (K + sn2 I)^-1 k(X, x*)
GpPrediction gp_predict(const FittedGP& model, const Eigen::MatrixXd& test_inputs);

/// Process-wide count of predictive variances clamped up to zero. Values
/// below -1e-10 before clamping indicate real conditioning trouble; small
/// negatives are expected round-off and are clamped silently.
std::uint64_t negative_variance_clamps();
void reset_negative_variance_clamps();

struct OptimizerOptions {
  int restarts = 8;
  int max_iterations = 200;
  double gradient_tolerance = 1e-6;
  std::uint64_t seed = 0;
  int threads = 1;
  double noise_floor = 1e-10;  // lower bound kept on sigma_n^2 during optimization
  // When set, sigma_n^2 is pinned to this value instead of being optimized.
  // Useful when the measurement noise level is known or calibrated: a free
  // noise variance on badly displaced surrogate locations tends to absorb
  // genuine signal and flatten the fit.
  std::optional<double> fixed_noise_variance;
  // When set, lengthscale j is bounded above by this fraction of the data
  // range along coordinate j. Excludes quasi-constant fits whose likelihood
  // carries no location information.
  std::optional<double> max_lengthscale_fraction;
};

/// Maximizes the log-marginal likelihood over log-hyperparameters with
/// multi-start quasi-Newton ascent. Restart initializations are drawn
/// log-uniformly from
///   sf2 in [1e-2, 1e2] * var(y),  l_j in [1e-2, 1e1] * range(x_j),
///   sn2 in [1e-6, 1] * var(y),
/// and ties between restarts resolve to the lowest restart index, so the
/// result is deterministic for a given seed regardless of thread count.
/// Throws OptimizationFailedError if no restart reaches a finite objective.
KernelHyperparams fit_hyperparameters(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                                      const OptimizerOptions& opts = {});

/// Plug-in hyperparameter fit for data with uncertain inputs: the uncertain
/// locations are represented by their prior means, the surrogate dataset is
/// fitted once, and the result is frozen for all later sampling and
/// prediction (point estimate, never refit).
KernelHyperparams optimize_hyperparameters(const TrainingData& data, const OptimizerOptions& opts = {});

}  // namespace uigp
