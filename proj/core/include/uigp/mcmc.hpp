#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "uigp/gp.hpp"

namespace uigp {

/// Random-walk Metropolis tuning. Defaults give (20000 - 5000) / 15 = 1000
/// retained samples, sized for one-dimensional problems with up to a few
/// dozen uncertain points.
struct MetropolisConfig {
  int iterations = 20000;
  int burn_in = 5000;
  int thinning = 15;
  double step_scale = 0.25;  // proposal std = step_scale * prior std, per coordinate
  bool adapt_during_burn_in = true;
  std::uint64_t seed = 0;
  int chains = 1;  // > 1 pools independent chains, each with its own burn-in

  /// Throws std::invalid_argument on inconsistent fields; returns warnings
  /// (e.g. fewer than 100 retained samples) without failing.
  std::vector<std::string> validate() const;

  int retained_per_chain() const { return (iterations - burn_in) / thinning; }
};

/// Ordered retained samples of the uncertain input locations.
struct PosteriorChain {
  std::vector<Eigen::MatrixXd> samples;      // post burn-in, thinned, chain order
  std::vector<double> log_posterior_values;  // target re-evaluated values, same order
  double acceptance_rate = 0.0;              // accepted / proposed after burn-in
  MetropolisConfig config;
  std::vector<std::string> warnings;  // e.g. stuck-chain notice
};

using LogDensity = std::function<double(const Eigen::MatrixXd&)>;

/// Log of the unnormalized posterior over the uncertain input locations:
/// the joint-Gaussian likelihood of all outputs on [X_fixed; candidate]
/// (shared noise variance on the whole diagonal) plus the prior log-density
/// of the candidate. Hyperparameters must already be fitted and frozen.
/// Ill-conditioning propagates as IllConditionedKernelError; the sampler
/// treats that as log-density -inf.
double log_unnormalized_posterior(const Eigen::MatrixXd& candidate, const TrainingData& data,
                                  const KernelHyperparams& hp);

/// Closure over log_unnormalized_posterior; `data` is captured by reference
/// and must outlive the returned function.
LogDensity make_posterior_target(const TrainingData& data, const KernelHyperparams& hp);

/// Random-walk Metropolis with symmetric Gaussian proposals of per-coordinate
/// std = step_scale * proposal_scale(i,j). During burn-in (when enabled) the
/// scalar step_scale is multiplied by 0.9 / 1.1 every 100 steps to steer
/// acceptance into [0.2, 0.5]; adaptation freezes at burn-in end so the
/// stationary distribution of the retained samples is untouched.
/// With cfg.chains > 1, independent chains run from the same init with
/// derived seeds and their retained samples are pooled in chain order.
PosteriorChain run_metropolis(const LogDensity& target, const Eigen::MatrixXd& init,
                              const Eigen::MatrixXd& proposal_scale, const MetropolisConfig& cfg,
                              int threads = 1);

struct ChainDiagnostics {
  double acceptance_rate = 0.0;
  Eigen::MatrixXd mean;    // N_u x d posterior means
  Eigen::MatrixXd stddev;  // N_u x d posterior stds
  Eigen::MatrixXd ess;     // N_u x d effective sample sizes
};

/// Sample statistics plus effective sample size per coordinate, the latter
/// via initial-positive-sequence truncation of the autocorrelation sum.
ChainDiagnostics chain_diagnostics(const PosteriorChain& chain);

}  // namespace uigp
