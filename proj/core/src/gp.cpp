#include "uigp/gp.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "uigp/errors.hpp"
#include "lbfgs.hpp"
#include "parallel.hpp"

namespace uigp {

namespace {

std::atomic<std::uint64_t> g_variance_clamps{0};

Eigen::LLT<Eigen::MatrixXd> factorize_or_throw(const Eigen::MatrixXd& k_noisy, double jitter) {
  Eigen::LLT<Eigen::MatrixXd> llt(k_noisy);
  if (llt.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "Cholesky factorization of the " << k_noisy.rows() << "x" << k_noisy.cols()
        << " noise-augmented Gram matrix failed (jitter " << jitter << ")";
    throw IllConditionedKernelError(msg.str(), jitter);
  }
  return llt;
}

void check_dataset(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                   const KernelHyperparams& hp, const char* where) {
  hp.validate();
  if (inputs.rows() != outputs.size())
    throw std::invalid_argument(std::string(where) + ": " + std::to_string(inputs.rows()) +
                                " inputs vs " + std::to_string(outputs.size()) + " outputs");
  if (inputs.cols() != hp.dim())
    throw std::invalid_argument(std::string(where) + ": inputs have " + std::to_string(inputs.cols()) +
                                " columns, hyperparams expect " + std::to_string(hp.dim()));
}

}  // namespace

void TrainingData::validate() const {
  input_prior.validate();
  if (fixed_inputs.rows() != fixed_outputs.size())
    throw std::invalid_argument("TrainingData: " + std::to_string(fixed_inputs.rows()) +
                                " fixed inputs vs " + std::to_string(fixed_outputs.size()) +
                                " fixed outputs");
  if (input_prior.n_uncertain() != uncertain_outputs.size())
    throw std::invalid_argument("TrainingData: " + std::to_string(input_prior.n_uncertain()) +
                                " input priors vs " + std::to_string(uncertain_outputs.size()) +
                                " uncertain outputs");
  if (n_fixed() + n_uncertain() < 1)
    throw std::invalid_argument("TrainingData: dataset is empty");
  if (n_fixed() > 0 && n_uncertain() > 0 && fixed_inputs.cols() != input_prior.dim())
    throw std::invalid_argument("TrainingData: fixed inputs have " +
                                std::to_string(fixed_inputs.cols()) + " columns but priors have " +
                                std::to_string(input_prior.dim()));
}

Eigen::MatrixXd TrainingData::stacked_inputs(const Eigen::MatrixXd& candidate) const {
  if (candidate.rows() != n_uncertain())
    throw std::invalid_argument("TrainingData: candidate has " + std::to_string(candidate.rows()) +
                                " rows, expected " + std::to_string(n_uncertain()));
  if (candidate.rows() == 0) return fixed_inputs;
  if (candidate.cols() != dim())
    throw std::invalid_argument("TrainingData: candidate has " + std::to_string(candidate.cols()) +
                                " columns, expected " + std::to_string(dim()));
  Eigen::MatrixXd stacked(n_fixed() + n_uncertain(), dim());
  stacked.topRows(n_fixed()) = fixed_inputs;
  stacked.bottomRows(candidate.rows()) = candidate;
  return stacked;
}

Eigen::VectorXd TrainingData::stacked_outputs() const {
  Eigen::VectorXd stacked(n_fixed() + n_uncertain());
  stacked.head(n_fixed()) = fixed_outputs;
  stacked.tail(n_uncertain()) = uncertain_outputs;
  return stacked;
}

Eigen::MatrixXd TrainingData::surrogate_inputs() const { return stacked_inputs(input_prior.means); }

double log_marginal_likelihood(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                               const KernelHyperparams& hp) {
  check_dataset(inputs, outputs, hp, "log_marginal_likelihood");
  if (inputs.rows() < 1) throw std::invalid_argument("log_marginal_likelihood: empty dataset");

  const double jitter = default_jitter(hp);
  const Eigen::MatrixXd k = gram_matrix(inputs, inputs, hp, /*add_noise=*/true, jitter);
  const auto llt = factorize_or_throw(k, jitter);
  const Eigen::VectorXd alpha = llt.solve(outputs);
  const double n = static_cast<double>(inputs.rows());

  double log_det_half = 0.0;
  for (Eigen::Index i = 0; i < inputs.rows(); ++i)
    log_det_half += std::log(llt.matrixLLT()(i, i));

  return -0.5 * outputs.dot(alpha) - log_det_half - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

Eigen::VectorXd lml_gradient(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                             const KernelHyperparams& hp) {
  check_dataset(inputs, outputs, hp, "lml_gradient");
  const Eigen::Index n = inputs.rows();
  const Eigen::Index d = hp.dim();
  const double jitter = default_jitter(hp);

  const Eigen::MatrixXd k_signal = gram_matrix(inputs, inputs, hp, /*add_noise=*/false);
  Eigen::MatrixXd k_noisy = k_signal;
  k_noisy.diagonal().array() += hp.noise_variance + jitter;
  const auto llt = factorize_or_throw(k_noisy, jitter);

  const Eigen::VectorXd alpha = llt.solve(outputs);
  const Eigen::MatrixXd k_inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  // d LML / d theta = 1/2 tr((alpha alpha^T - K^-1) dK/dtheta)
  const Eigen::MatrixXd m = alpha * alpha.transpose() - k_inv;

  // Above the max(1, .) kink the jitter itself scales with sf2 + sn2, which
  // contributes to the diagonal derivatives.
  const double jitter_slope =
      hp.signal_variance + hp.noise_variance > 1.0 ? kJitterRelative : 0.0;

  Eigen::VectorXd grad(d + 2);
  grad[0] = 0.5 * m.cwiseProduct(k_signal).sum() +
            0.5 * jitter_slope * hp.signal_variance * m.trace();
  for (Eigen::Index j = 0; j < d; ++j) {
    const Eigen::VectorXd xj = inputs.col(j) / hp.lengthscales[j];
    Eigen::MatrixXd sq = -2.0 * xj * xj.transpose();
    sq.colwise() += xj.cwiseAbs2();
    sq.rowwise() += xj.cwiseAbs2().transpose();
    grad[1 + j] = 0.5 * m.cwiseProduct(k_signal.cwiseProduct(sq.cwiseMax(0.0))).sum();
  }
  grad[d + 1] = 0.5 * (1.0 + jitter_slope) * hp.noise_variance * m.trace();
  return grad;
}

FittedGP gp_fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                const KernelHyperparams& hp) {
  check_dataset(inputs, outputs, hp, "gp_fit");
  if (inputs.rows() < 1) throw std::invalid_argument("gp_fit: empty dataset");

  FittedGP model;
  model.training_inputs = inputs;
  model.training_outputs = outputs;
  model.hyperparams = hp;
  model.jitter = default_jitter(hp);
  const Eigen::MatrixXd k = gram_matrix(inputs, inputs, hp, /*add_noise=*/true, model.jitter);
  const auto llt = factorize_or_throw(k, model.jitter);
  model.cholesky_factor = llt.matrixL();
  model.alpha = llt.solve(outputs);
  return model;
}

GpPrediction gp_predict(const FittedGP& model, const Eigen::MatrixXd& test_inputs) {
  if (test_inputs.cols() != model.hyperparams.dim())
    throw std::invalid_argument("gp_predict: test inputs have " + std::to_string(test_inputs.cols()) +
                                " columns, model expects " + std::to_string(model.hyperparams.dim()));

  const Eigen::MatrixXd k_star = gram_matrix(test_inputs, model.training_inputs, model.hyperparams);
  GpPrediction out;
  out.mean = k_star * model.alpha;

  // v = k(x*,x*) - || L^-1 k(X,x*) ||^2, with k(x*,x*) = sf2 for this kernel.
  Eigen::MatrixXd v = k_star.transpose();
  model.cholesky_factor.triangularView<Eigen::Lower>().solveInPlace(v);
  out.variance = (model.hyperparams.signal_variance - v.colwise().squaredNorm().array()).matrix();

  for (Eigen::Index i = 0; i < out.variance.size(); ++i) {
    if (out.variance[i] < 0.0) {
      out.variance[i] = 0.0;
      g_variance_clamps.fetch_add(1, std::memory_order_relaxed);
    }
  }
  return out;
}

std::uint64_t negative_variance_clamps() { return g_variance_clamps.load(std::memory_order_relaxed); }
void reset_negative_variance_clamps() { g_variance_clamps.store(0, std::memory_order_relaxed); }

KernelHyperparams fit_hyperparameters(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                                      const OptimizerOptions& opts) {
  if (inputs.rows() < 1) throw std::invalid_argument("fit_hyperparameters: empty dataset");
  if (inputs.rows() != outputs.size())
    throw std::invalid_argument("fit_hyperparameters: " + std::to_string(inputs.rows()) +
                                " inputs vs " + std::to_string(outputs.size()) + " outputs");
  if (opts.restarts < 1) throw std::invalid_argument("fit_hyperparameters: restarts must be >= 1");

  const Eigen::Index d = inputs.cols();
  const Eigen::Index n = inputs.rows();

  double var_y = 1.0;
  if (n > 1) {
    const double mean_y = outputs.mean();
    var_y = (outputs.array() - mean_y).square().sum() / static_cast<double>(n - 1);
  }
  if (!(var_y > 0.0)) var_y = 1.0;

  Eigen::VectorXd range(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double r = inputs.col(j).maxCoeff() - inputs.col(j).minCoeff();
    range[j] = r > 0.0 ? r : 1.0;
  }

  // With a pinned noise variance the search runs over [log sf2, log l_1..d]
  // only; otherwise log sn2 is appended as a free coordinate.
  const bool noise_free_param = opts.fixed_noise_variance.has_value();
  const Eigen::Index n_params = noise_free_param ? d + 1 : d + 2;
  auto expand = [&](const Eigen::VectorXd& v) {
    if (!noise_free_param) return from_log_vector(v);
    Eigen::VectorXd full(d + 2);
    full.head(d + 1) = v;
    full[d + 1] = std::log(std::max(*opts.fixed_noise_variance, opts.noise_floor));
    return from_log_vector(full);
  };

  // Draw every restart initialization up front from one stream so the set of
  // starting points does not depend on the thread count.
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) {
    return std::log(lo) + unit(rng) * (std::log(hi) - std::log(lo));
  };
  std::vector<Eigen::VectorXd> starts(opts.restarts, Eigen::VectorXd(n_params));
  for (auto& s : starts) {
    s[0] = log_uniform(1e-2 * var_y, 1e2 * var_y);
    for (Eigen::Index j = 0; j < d; ++j) s[1 + j] = log_uniform(1e-2 * range[j], 1e1 * range[j]);
    if (!noise_free_param) s[d + 1] = log_uniform(1e-6 * var_y, var_y);
  }

  Eigen::VectorXd lower = Eigen::VectorXd::Constant(n_params, -46.0);
  Eigen::VectorXd upper = Eigen::VectorXd::Constant(n_params, 46.0);
  if (!noise_free_param) lower[d + 1] = std::max(lower[d + 1], std::log(opts.noise_floor));
  if (opts.max_lengthscale_fraction) {
    for (Eigen::Index j = 0; j < d; ++j)
      upper[1 + j] = std::log(*opts.max_lengthscale_fraction * range[j]);
    for (auto& s : starts)
      for (Eigen::Index j = 0; j < d; ++j) s[1 + j] = std::min(s[1 + j], upper[1 + j]);
  }

  detail::ValueAndGradient objective = [&](const Eigen::VectorXd& v, Eigen::VectorXd& grad) {
    grad.setZero(v.size());
    try {
      const KernelHyperparams hp = expand(v);
      const double value = log_marginal_likelihood(inputs, outputs, hp);
      if (!std::isfinite(value)) return std::numeric_limits<double>::infinity();
      grad = -lml_gradient(inputs, outputs, hp).head(n_params);
      return -value;
    } catch (const IllConditionedKernelError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  std::vector<detail::LbfgsResult> results(opts.restarts);
  detail::parallel_for_index(opts.restarts, opts.threads, [&](Eigen::Index r) {
    results[r] = detail::lbfgs_minimize(objective, starts[r], lower, upper, opts.max_iterations,
                                        opts.gradient_tolerance);
  });

  int best = -1;
  for (int r = 0; r < opts.restarts; ++r) {
    if (!std::isfinite(results[r].value)) continue;
    if (best < 0 || results[r].value < results[best].value) best = r;  // strict: ties keep lowest index
  }
  if (best < 0) {
    std::ostringstream msg;
    msg << "fit_hyperparameters: all " << opts.restarts
        << " restarts failed to reach a finite log-marginal likelihood (n=" << n << ", d=" << d
        << ", var(y)=" << var_y << ")";
    throw OptimizationFailedError(msg.str());
  }
  return expand(results[best].x);
}

KernelHyperparams optimize_hyperparameters(const TrainingData& data, const OptimizerOptions& opts) {
  data.validate();
  return fit_hyperparameters(data.surrogate_inputs(), data.stacked_outputs(), opts);
}

}  // namespace uigp
