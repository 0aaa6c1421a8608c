#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "uigp/errors.hpp"
#include "uigp/gp.hpp"
#include "test_helpers.hpp"

using uigp::KernelHyperparams;
using uigp::TrainingData;

namespace {

KernelHyperparams hp_1d(double sf2, double ell, double sn2) {
  KernelHyperparams hp;
  hp.signal_variance = sf2;
  hp.lengthscales = Eigen::VectorXd::Constant(1, ell);
  hp.noise_variance = sn2;
  return hp;
}

struct RandomDataset {
  Eigen::MatrixXd inputs;
  Eigen::VectorXd outputs;
  KernelHyperparams hp;
};

RandomDataset random_dataset(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RandomDataset ds;
  ds.inputs.resize(n, 1);
  ds.outputs.resize(n);
  for (int i = 0; i < n; ++i) {
    ds.inputs(i, 0) = 5.0 * unif(rng);
    ds.outputs[i] = 2.0 * unif(rng) - 1.0;
  }
  ds.hp = hp_1d(0.5 + 1.5 * unif(rng), 0.3 + 2.0 * unif(rng), 1e-3 + 0.1 * unif(rng));
  return ds;
}

}  // namespace

TEST_SUITE("gp-core") {

TEST_CASE("single-point log-marginal likelihood, zero output") {
  auto hp = hp_1d(1.0, 1.0, 0.0);
  Eigen::MatrixXd x(1, 1);
  x << 0.4;
  Eigen::VectorXd y(1);
  y << 0.0;
  const double lml = uigp::log_marginal_likelihood(x, y, hp);
  CHECK(lml == doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi)).epsilon(1e-7));
}

TEST_CASE("single-point log-marginal likelihood, output two") {
  auto hp = hp_1d(1.0, 1.0, 0.0);
  Eigen::MatrixXd x(1, 1);
  x << -2.0;
  Eigen::VectorXd y(1);
  y << 2.0;
  const double lml = uigp::log_marginal_likelihood(x, y, hp);
  CHECK(lml == doctest::Approx(-2.0 - 0.5 * std::log(2.0 * std::numbers::pi)).epsilon(1e-7));
}

TEST_CASE("log-marginal likelihood matches a dense normal log-density") {
  const auto ds = random_dataset(2024, 5);
  const double jitter = uigp::default_jitter(ds.hp);
  const Eigen::MatrixXd cov = uigp::gram_matrix(ds.inputs, ds.inputs, ds.hp, true, jitter);
  const double expected = test_oracles::dense_mvn_logpdf(ds.outputs, cov);
  CHECK(uigp::log_marginal_likelihood(ds.inputs, ds.outputs, ds.hp) ==
        doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("log-marginal likelihood is permutation invariant") {
  const auto ds = random_dataset(31, 12);
  const double base = uigp::log_marginal_likelihood(ds.inputs, ds.outputs, ds.hp);

  std::vector<int> perm(12);
  for (int i = 0; i < 12; ++i) perm[i] = i;
  std::mt19937_64 rng(8);
  std::shuffle(perm.begin(), perm.end(), rng);

  Eigen::MatrixXd px(12, 1);
  Eigen::VectorXd py(12);
  for (int i = 0; i < 12; ++i) {
    px(i, 0) = ds.inputs(perm[i], 0);
    py[i] = ds.outputs[perm[i]];
  }
  CHECK(uigp::log_marginal_likelihood(px, py, ds.hp) == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("gradient matches central finite differences on random datasets") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto ds = random_dataset(seed, 4 + static_cast<int>(seed % 9));
    const Eigen::VectorXd g = uigp::lml_gradient(ds.inputs, ds.outputs, ds.hp);
    const Eigen::VectorXd fd = test_oracles::fd_lml_gradient(ds.inputs, ds.outputs, ds.hp);
    REQUIRE(g.size() == fd.size());
    for (Eigen::Index k = 0; k < g.size(); ++k) CHECK(test_oracles::rel_err(g[k], fd[k]) < 1e-4);
  }
}

TEST_CASE("gradient with zero outputs isolates the determinant term") {
  auto ds = random_dataset(5, 8);
  ds.outputs.setZero();
  const Eigen::VectorXd g = uigp::lml_gradient(ds.inputs, ds.outputs, ds.hp);
  const Eigen::VectorXd fd = test_oracles::fd_lml_gradient(ds.inputs, ds.outputs, ds.hp);
  for (Eigen::Index k = 0; k < g.size(); ++k) CHECK(test_oracles::rel_err(g[k], fd[k]) < 1e-4);
}

TEST_CASE("gradient norm is tiny at an optimizer solution") {
  const auto hp_true = hp_1d(1.0, 1.0, 0.01);
  const auto data = test_oracles::draw_from_gp(40, hp_true, 10.0, 99);
  uigp::OptimizerOptions opts;
  opts.seed = 3;
  const KernelHyperparams fit = uigp::fit_hyperparameters(data.inputs, data.outputs, opts);
  const Eigen::VectorXd g = uigp::lml_gradient(data.inputs, data.outputs, fit);
  CHECK(g.norm() < 1e-5);
}

TEST_CASE("optimizer result dominates every restart initialization") {
  const auto ds = random_dataset(17, 15);
  uigp::OptimizerOptions opts;
  opts.seed = 11;
  const KernelHyperparams fit = uigp::fit_hyperparameters(ds.inputs, ds.outputs, opts);
  const double best = uigp::log_marginal_likelihood(ds.inputs, ds.outputs, fit);

  // Replay the restart draws: same generator, same order.
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) {
    return std::log(lo) + unit(rng) * (std::log(hi) - std::log(lo));
  };
  const double mean_y = ds.outputs.mean();
  const double var_y = (ds.outputs.array() - mean_y).square().sum() / (ds.outputs.size() - 1.0);
  const double range = ds.inputs.col(0).maxCoeff() - ds.inputs.col(0).minCoeff();
  for (int r = 0; r < opts.restarts; ++r) {
    Eigen::VectorXd v(3);
    v[0] = log_uniform(1e-2 * var_y, 1e2 * var_y);
    v[1] = log_uniform(1e-2 * range, 1e1 * range);
    v[2] = log_uniform(1e-6 * var_y, var_y);
    const double at_start = uigp::log_marginal_likelihood(ds.inputs, ds.outputs, uigp::from_log_vector(v));
    CHECK(best >= at_start - 1e-9);
  }
}

TEST_CASE("optimizer recovers the lengthscale of a known generator") {
  const auto hp_true = hp_1d(1.0, 1.0, 0.01);
  const auto data = test_oracles::draw_from_gp(60, hp_true, 15.0, 4242);
  uigp::OptimizerOptions opts;
  opts.seed = 1;
  const KernelHyperparams fit = uigp::fit_hyperparameters(data.inputs, data.outputs, opts);
  CHECK(fit.lengthscales[0] > 0.5);
  CHECK(fit.lengthscales[0] < 2.0);
}

TEST_CASE("noise-free interpolation drives the fitted noise to the floor") {
  // Deterministic smooth data in the 8-point regime.
  Eigen::MatrixXd x(8, 1);
  x << 0.5, 3.1, 6.8, 9.9, 13.2, 17.0, 20.4, 24.1;
  Eigen::VectorXd y(8);
  for (int i = 0; i < 8; ++i) y[i] = -x(i, 0) * std::sin(x(i, 0) / 3.0);

  uigp::OptimizerOptions opts;
  opts.seed = 2;
  const KernelHyperparams fit = uigp::fit_hyperparameters(x, y, opts);
  CHECK(fit.noise_variance < 1e-4 * fit.signal_variance);
}

TEST_CASE("optimize_hyperparameters uses the prior-mean surrogate") {
  TrainingData data;
  data.fixed_inputs.resize(3, 1);
  data.fixed_inputs << 0.0, 2.0, 4.0;
  data.fixed_outputs.resize(3);
  data.fixed_outputs << 0.1, -0.4, 0.3;
  data.uncertain_outputs.resize(2);
  data.uncertain_outputs << 0.6, -0.2;
  data.input_prior.means.resize(2, 1);
  data.input_prior.means << 1.0, 3.0;
  data.input_prior.std_devs = Eigen::MatrixXd::Constant(2, 1, 0.5);

  uigp::OptimizerOptions opts;
  opts.seed = 6;
  const KernelHyperparams via_data = uigp::optimize_hyperparameters(data, opts);
  const KernelHyperparams via_surrogate =
      uigp::fit_hyperparameters(data.surrogate_inputs(), data.stacked_outputs(), opts);
  CHECK(via_data.signal_variance == via_surrogate.signal_variance);
  CHECK(via_data.lengthscales[0] == via_surrogate.lengthscales[0]);
  CHECK(via_data.noise_variance == via_surrogate.noise_variance);
}

TEST_CASE("fit is deterministic and satisfies its invariants") {
  const auto ds = random_dataset(71, 9);
  const auto fit1 = uigp::gp_fit(ds.inputs, ds.outputs, ds.hp);
  const auto fit2 = uigp::gp_fit(ds.inputs, ds.outputs, ds.hp);
  CHECK(fit1.alpha == fit2.alpha);  // bit-identical refit

  const Eigen::MatrixXd k =
      uigp::gram_matrix(ds.inputs, ds.inputs, ds.hp, true, fit1.jitter);
  const Eigen::MatrixXd recon =
      fit1.cholesky_factor * fit1.cholesky_factor.transpose();
  CHECK((recon - k).cwiseAbs().maxCoeff() / k.cwiseAbs().maxCoeff() < 1e-8);

  const Eigen::VectorXd residual = k * fit1.alpha - ds.outputs;
  CHECK(residual.norm() / ds.outputs.norm() < 1e-8);
}

TEST_CASE("single-point fit solves the scalar system") {
  auto hp = hp_1d(2.0, 1.0, 0.5);
  Eigen::MatrixXd x(1, 1);
  x << 1.0;
  Eigen::VectorXd y(1);
  y << 3.0;
  const auto fit = uigp::gp_fit(x, y, hp);
  CHECK(fit.alpha[0] == doctest::Approx(3.0 / (2.0 + 0.5 + fit.jitter)).epsilon(1e-14));
}

TEST_CASE("prediction interpolates noise-free training data") {
  auto hp = hp_1d(1.5, 2.0, 0.0);
  Eigen::MatrixXd x(5, 1);
  x << 0.0, 2.0, 4.5, 7.0, 9.0;
  Eigen::VectorXd y(5);
  y << 0.3, -1.0, 0.8, 2.0, -0.7;
  const auto fit = uigp::gp_fit(x, y, hp);
  const auto pred = uigp::gp_predict(fit, x);
  for (int i = 0; i < 5; ++i) {
    CHECK(pred.mean[i] == doctest::Approx(y[i]).epsilon(1e-6));
    CHECK(pred.variance[i] < 1e-6 * hp.signal_variance);
  }
}

TEST_CASE("prediction reverts to the prior far from the data") {
  auto hp = hp_1d(2.5, 1.0, 0.0);
  Eigen::MatrixXd x(3, 1);
  x << 0.0, 1.0, 2.0;
  Eigen::VectorXd y(3);
  y << 1.0, -1.0, 0.5;
  const auto fit = uigp::gp_fit(x, y, hp);
  Eigen::MatrixXd far(1, 1);
  far << 2.0 + 25.0;
  const auto pred = uigp::gp_predict(fit, far);
  CHECK(std::abs(pred.mean[0]) < 1e-6);
  CHECK(pred.variance[0] == doctest::Approx(hp.signal_variance).epsilon(1e-6));
}

TEST_CASE("prediction matches the dense conditional-Gaussian formulas") {
  const auto ds = random_dataset(2025, 7);
  const auto fit = uigp::gp_fit(ds.inputs, ds.outputs, ds.hp);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(0.0, 5.0);
  Eigen::MatrixXd test(3, 1);
  for (int i = 0; i < 3; ++i) test(i, 0) = unif(rng);

  const auto pred = uigp::gp_predict(fit, test);

  const Eigen::MatrixXd k = uigp::gram_matrix(ds.inputs, ds.inputs, ds.hp, true, fit.jitter);
  const Eigen::MatrixXd k_inv = k.inverse();
  const Eigen::MatrixXd ks = uigp::gram_matrix(test, ds.inputs, ds.hp);
  const Eigen::VectorXd mean = ks * k_inv * ds.outputs;
  for (int i = 0; i < 3; ++i) {
    const double var = ds.hp.signal_variance - ks.row(i) * k_inv * ks.row(i).transpose();
    CHECK(pred.mean[i] == doctest::Approx(mean[i]).epsilon(1e-8));
    CHECK(pred.variance[i] == doctest::Approx(var).epsilon(1e-8));
  }
}

TEST_CASE("adding a training point never increases predictive variance") {
  std::mt19937_64 rng(314);
  std::uniform_real_distribution<double> unif(0.0, 10.0);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 5 + static_cast<int>(rng() % 10);
    Eigen::MatrixXd x(n + 1, 1);
    Eigen::VectorXd y(n + 1);
    for (int i = 0; i <= n; ++i) {
      x(i, 0) = unif(rng);
      y[i] = std::sin(x(i, 0));
    }
    auto hp = hp_1d(1.0, 1.5, 1e-4);

    const auto small_fit = uigp::gp_fit(x.topRows(n), y.head(n), hp);
    const auto big_fit = uigp::gp_fit(x, y, hp);

    Eigen::MatrixXd test(20, 1);
    for (int i = 0; i < 20; ++i) test(i, 0) = unif(rng);
    const auto v_small = uigp::gp_predict(small_fit, test).variance;
    const auto v_big = uigp::gp_predict(big_fit, test).variance;
    for (int i = 0; i < 20; ++i) CHECK(v_big[i] <= v_small[i] + 1e-8);
  }
}

TEST_CASE("predictive variance stays within clamping tolerance") {
  uigp::reset_negative_variance_clamps();
  const auto ds = random_dataset(55, 25);
  const auto fit = uigp::gp_fit(ds.inputs, ds.outputs, ds.hp);
  Eigen::MatrixXd test(200, 1);
  for (int i = 0; i < 200; ++i) test(i, 0) = 5.0 * i / 199.0;
  const auto pred = uigp::gp_predict(fit, test);
  CHECK(pred.variance.minCoeff() >= 0.0);
  CHECK(uigp::negative_variance_clamps() == 0);  // well-conditioned case
}

TEST_CASE("dimension mismatches are rejected") {
  const auto ds = random_dataset(1, 4);
  const auto fit = uigp::gp_fit(ds.inputs, ds.outputs, ds.hp);
  CHECK_THROWS_AS(uigp::gp_predict(fit, Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);
  CHECK_THROWS_AS(uigp::log_marginal_likelihood(ds.inputs, Eigen::VectorXd::Zero(3), ds.hp),
                  std::invalid_argument);
}

}  // TEST_SUITE
