#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "uigp/gp.hpp"

namespace uigp {

enum class PredictiveSource { prior, posterior };

/// Moments of the predictive distribution marginalized over a set of
/// uncertain-input realizations, together with the per-realization GP
/// moments they were combined from. The combination is the law of total
/// expectation/variance over the sample set:
///   marginal_mean     = column average of per_sample_means
///   marginal_variance = column average of per_sample_variances
///                     + population variance (divisor S) of per_sample_means
struct PredictiveSummary {
  Eigen::MatrixXd test_inputs;           // m x d
  Eigen::VectorXd marginal_mean;         // m
  Eigen::VectorXd marginal_variance;     // m, nonnegative
  Eigen::MatrixXd per_sample_means;      // S x m
  Eigen::MatrixXd per_sample_variances;  // S x m
  PredictiveSource source = PredictiveSource::posterior;
  int dropped_samples = 0;  // per-sample fits dropped for ill-conditioning
};

/// Fits one GP per uncertain-input realization (fixed inputs + realization,
/// all outputs, frozen hyperparameters including the shared noise variance)
/// and combines the per-sample predictive moments. Samples whose fit is
/// ill-conditioned are dropped; more than 5% dropped (or all) raises
/// PredictionFailedError so silent mass-dropping cannot bias the moments.
PredictiveSummary marginal_predict(const std::vector<Eigen::MatrixXd>& samples,
                                   const TrainingData& data, const KernelHyperparams& hp,
                                   const Eigen::MatrixXd& test_inputs, int threads = 1,
                                   PredictiveSource source = PredictiveSource::posterior);

/// marginal_predict over i.i.d. draws from the given prior; the baseline
/// that skips location inference entirely.
PredictiveSummary prior_marginal_predict(const InputPrior& prior, int sample_count,
                                         const TrainingData& data, const KernelHyperparams& hp,
                                         const Eigen::MatrixXd& test_inputs, std::uint64_t seed,
                                         int threads = 1);

}  // namespace uigp
