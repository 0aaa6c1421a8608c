#include "uigp/mcmc.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "uigp/errors.hpp"
#include "uigp/rng.hpp"
#include "parallel.hpp"

namespace uigp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kAdaptWindow = 100;
constexpr int kStuckThreshold = 1000;

double eval_target(const LogDensity& target, const Eigen::MatrixXd& x) {
  try {
    return target(x);
  } catch (const IllConditionedKernelError&) {
    return kNegInf;  // a proposal that breaks the factorization is auto-rejected
  }
}

struct SingleChainResult {
  std::vector<Eigen::MatrixXd> samples;
  std::vector<double> log_values;
  long accepted_post = 0;
  long proposals_post = 0;
  bool stuck = false;
};

SingleChainResult run_single_chain(const LogDensity& target, const Eigen::MatrixXd& init,
                                   const Eigen::MatrixXd& proposal_scale, const MetropolisConfig& cfg,
                                   std::uint64_t seed) {
  SingleChainResult res;
  res.samples.reserve(cfg.retained_per_chain());
  res.log_values.reserve(cfg.retained_per_chain());

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Eigen::MatrixXd current = init;
  double current_lp = eval_target(target, current);
  if (!std::isfinite(current_lp))
    throw std::invalid_argument("run_metropolis: target is not finite at the initial point");

  double scale = cfg.step_scale;
  int window_accepted = 0;
  int window_count = 0;
  long consecutive_rejects = 0;

  Eigen::MatrixXd proposal(init.rows(), init.cols());
  for (int t = 1; t <= cfg.iterations; ++t) {
    for (Eigen::Index i = 0; i < proposal.rows(); ++i)
      for (Eigen::Index j = 0; j < proposal.cols(); ++j)
        proposal(i, j) = current(i, j) + scale * proposal_scale(i, j) * normal(rng);

    const double proposal_lp = eval_target(target, proposal);
    const double u = unit(rng);  // always drawn, keeps the stream aligned
    const bool accept = std::log(u) < proposal_lp - current_lp;
    if (accept) {
      current.swap(proposal);
      current_lp = proposal_lp;
    }

    const bool past_burn_in = t > cfg.burn_in;
    if (past_burn_in) {
      ++res.proposals_post;
      if (accept) {
        ++res.accepted_post;
        consecutive_rejects = 0;
      } else if (++consecutive_rejects == kStuckThreshold) {
        res.stuck = true;
      }
      if ((t - cfg.burn_in) % cfg.thinning == 0) {
        res.samples.push_back(current);
        res.log_values.push_back(current_lp);
      }
    } else if (cfg.adapt_during_burn_in) {
      window_accepted += accept ? 1 : 0;
      if (++window_count == kAdaptWindow) {
        const double rate = static_cast<double>(window_accepted) / kAdaptWindow;
        if (rate < 0.2)
          scale *= 0.9;
        else if (rate > 0.5)
          scale *= 1.1;
        window_accepted = 0;
        window_count = 0;
      }
    }
  }
  return res;
}

}  // namespace

std::vector<std::string> MetropolisConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("MetropolisConfig: iterations must be positive");
  if (burn_in < 0 || burn_in >= iterations)
    throw std::invalid_argument("MetropolisConfig: burn_in must lie in [0, iterations)");
  if (thinning < 1) throw std::invalid_argument("MetropolisConfig: thinning must be positive");
  if (!(step_scale > 0.0)) throw std::invalid_argument("MetropolisConfig: step_scale must be positive");
  if (chains < 1) throw std::invalid_argument("MetropolisConfig: chains must be >= 1");

  std::vector<std::string> warnings;
  if (retained_per_chain() < 1)
    throw std::invalid_argument("MetropolisConfig: no samples retained: (iterations - burn_in) < thinning");
  if (chains * retained_per_chain() < 100)
    warnings.push_back("MetropolisConfig: only " + std::to_string(chains * retained_per_chain()) +
                       " retained samples; production runs should keep at least 100");
  return warnings;
}

double log_unnormalized_posterior(const Eigen::MatrixXd& candidate, const TrainingData& data,
                                  const KernelHyperparams& hp) {
  const double prior = log_prior_density(candidate, data.input_prior);
  const double likelihood =
      log_marginal_likelihood(data.stacked_inputs(candidate), data.stacked_outputs(), hp);
  return prior + likelihood;
}

LogDensity make_posterior_target(const TrainingData& data, const KernelHyperparams& hp) {
  return [&data, hp](const Eigen::MatrixXd& candidate) {
    return log_unnormalized_posterior(candidate, data, hp);
  };
}

PosteriorChain run_metropolis(const LogDensity& target, const Eigen::MatrixXd& init,
                              const Eigen::MatrixXd& proposal_scale, const MetropolisConfig& cfg,
                              int threads) {
  PosteriorChain chain;
  chain.config = cfg;
  chain.warnings = cfg.validate();
  if (proposal_scale.rows() != init.rows() || proposal_scale.cols() != init.cols())
    throw std::invalid_argument("run_metropolis: proposal_scale shape does not match init");
  if (init.size() > 0 && (proposal_scale.array() <= 0.0).any())
    throw std::invalid_argument("run_metropolis: proposal_scale entries must be positive");

  std::vector<SingleChainResult> results(cfg.chains);
  detail::parallel_for_index(cfg.chains, threads, [&](Eigen::Index c) {
    const std::uint64_t seed = cfg.chains == 1 ? cfg.seed : derive_seed(cfg.seed, static_cast<std::uint64_t>(c));
    results[c] = run_single_chain(target, init, proposal_scale, cfg, seed);
  });

  long accepted = 0;
  long proposed = 0;
  for (int c = 0; c < cfg.chains; ++c) {
    auto& r = results[c];
    chain.samples.insert(chain.samples.end(), r.samples.begin(), r.samples.end());
    chain.log_posterior_values.insert(chain.log_posterior_values.end(), r.log_values.begin(),
                                      r.log_values.end());
    accepted += r.accepted_post;
    proposed += r.proposals_post;
    if (r.stuck)
      chain.warnings.push_back("chain " + std::to_string(c) + ": " + std::to_string(kStuckThreshold) +
                               " consecutive rejections after burn-in; the sampler may be stuck");
  }
  chain.acceptance_rate = proposed > 0 ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
  return chain;
}

namespace {

// Effective sample size with Geyer's initial-positive-sequence truncation.
double ess_of_series(const Eigen::VectorXd& z) {
  const Eigen::Index n = z.size();
  if (n < 2) return 1.0;
  const double mean = z.mean();
  const Eigen::VectorXd c = z.array() - mean;
  const double var0 = c.squaredNorm() / static_cast<double>(n);
  if (var0 <= 0.0) return 1.0;  // constant series carries one sample of information

  auto rho = [&](Eigen::Index lag) {
    return c.head(n - lag).dot(c.tail(n - lag)) / static_cast<double>(n) / var0;
  };

  double tau = -1.0;  // accumulates -rho_0 + 2 * sum of positive pair sums
  for (Eigen::Index m = 0; 2 * m + 1 < n; ++m) {
    const double pair = rho(2 * m) + rho(2 * m + 1);
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  tau = std::max(tau, 1e-12);
  return static_cast<double>(n) / tau;
}

}  // namespace

ChainDiagnostics chain_diagnostics(const PosteriorChain& chain) {
  if (chain.samples.empty()) throw std::invalid_argument("chain_diagnostics: empty chain");
  const Eigen::Index n = static_cast<Eigen::Index>(chain.samples.size());
  const Eigen::Index rows = chain.samples.front().rows();
  const Eigen::Index cols = chain.samples.front().cols();

  ChainDiagnostics diag;
  diag.acceptance_rate = chain.acceptance_rate;
  diag.mean.setZero(rows, cols);
  diag.stddev.setZero(rows, cols);
  diag.ess.setZero(rows, cols);

  Eigen::VectorXd series(n);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index t = 0; t < n; ++t) series[t] = chain.samples[t](i, j);
      diag.mean(i, j) = series.mean();
      diag.stddev(i, j) =
          n > 1 ? std::sqrt((series.array() - diag.mean(i, j)).square().sum() / static_cast<double>(n - 1))
                : 0.0;
      diag.ess(i, j) = ess_of_series(series);
    }
  }
  return diag;
}

}  // namespace uigp
