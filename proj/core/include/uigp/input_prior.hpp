#pragma once

#include <Eigen/Dense>
#include <random>

namespace uigp {

/// Independent Gaussian priors over the uncertain input locations: row i
/// holds the mean (resp. std-dev) of uncertain point i, one column per
/// coordinate. Configured via std-devs, not variances; +/-2 std-devs spans
/// the 95% band of each coordinate.
struct InputPrior {
  Eigen::MatrixXd means;     // N_u x d
  Eigen::MatrixXd std_devs;  // N_u x d, all entries > 0

  Eigen::Index n_uncertain() const { return means.rows(); }
  Eigen::Index dim() const { return means.cols(); }

  /// Throws std::invalid_argument on shape mismatch or nonpositive std-dev.
  /// Zero std-devs are rejected; genuinely fixed points belong in the fixed
  /// set, not here.
  void validate() const;
};

/// Joint log-density of a candidate location matrix under the prior: the sum
/// of independent scalar Gaussian log-densities over all entries.
double log_prior_density(const Eigen::MatrixXd& candidate, const InputPrior& prior);

/// One independent draw per entry. The caller owns the RNG stream so that
/// parallel consumers can use disjoint streams.
Eigen::MatrixXd sample_prior(const InputPrior& prior, std::mt19937_64& rng);

}  // namespace uigp
