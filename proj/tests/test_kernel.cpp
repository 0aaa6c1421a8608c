#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "uigp/kernel.hpp"

using uigp::KernelHyperparams;

namespace {

KernelHyperparams hp_1d(double sf2, double ell, double sn2) {
  KernelHyperparams hp;
  hp.signal_variance = sf2;
  hp.lengthscales = Eigen::VectorXd::Constant(1, ell);
  hp.noise_variance = sn2;
  return hp;
}

}  // namespace

TEST_SUITE("kernel") {

TEST_CASE("covariance at zero distance is the signal variance") {
  auto hp = hp_1d(2.0, 1.3, 0.0);
  Eigen::VectorXd x(1);
  x << 0.7;
  CHECK(uigp::se_ard_covariance(x, x, hp) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("covariance one lengthscale apart") {
  auto hp = hp_1d(1.0, 0.8, 0.0);
  Eigen::VectorXd x1(1), x2(1);
  x1 << 0.0;
  x2 << 0.8;
  CHECK(uigp::se_ard_covariance(x1, x2, hp) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("covariance is symmetric in its arguments") {
  KernelHyperparams hp;
  hp.signal_variance = 1.7;
  hp.lengthscales = Eigen::VectorXd::Constant(3, 0.0);
  hp.lengthscales << 0.5, 1.5, 3.0;
  hp.noise_variance = 0.1;

  std::mt19937_64 rng(42);
  std::normal_distribution<double> normal(0.0, 2.0);
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd a(3), b(3);
    for (int j = 0; j < 3; ++j) {
      a[j] = normal(rng);
      b[j] = normal(rng);
    }
    CHECK(uigp::se_ard_covariance(a, b, hp) == uigp::se_ard_covariance(b, a, hp));
  }
}

TEST_CASE("covariance rejects dimension mismatch") {
  auto hp = hp_1d(1.0, 1.0, 0.0);
  Eigen::VectorXd a(2), b(1);
  a << 0.0, 1.0;
  b << 0.0;
  CHECK_THROWS_AS(uigp::se_ard_covariance(a, b, hp), std::invalid_argument);
}

TEST_CASE("one-point noisy gram matrix") {
  auto hp = hp_1d(1.0, 1.0, 0.1);
  Eigen::MatrixXd a(1, 1);
  a << 0.3;
  const Eigen::MatrixXd k = uigp::gram_matrix(a, a, hp, true, 0.0);
  REQUIRE(k.rows() == 1);
  CHECK(k(0, 0) == doctest::Approx(1.1).epsilon(1e-15));
}

TEST_CASE("noise-augmented gram admits a Cholesky factorization") {
  auto hp = hp_1d(1.0, 0.5, 1e-2);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 5.0);
  Eigen::MatrixXd a(10, 1);
  for (int i = 0; i < 10; ++i) a(i, 0) = unif(rng);

  const Eigen::MatrixXd k = uigp::gram_matrix(a, a, hp, true);
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  REQUIRE(llt.info() == Eigen::Success);
  for (int i = 0; i < 10; ++i) CHECK(llt.matrixLLT()(i, i) > 0.0);
}

TEST_CASE("cross gram transposes") {
  KernelHyperparams hp;
  hp.signal_variance = 2.5;
  hp.lengthscales = Eigen::VectorXd::Constant(2, 1.0);
  hp.lengthscales << 0.7, 2.0;

  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd a(6, 2), b(4, 2);
  for (int i = 0; i < a.size(); ++i) a(i / 2, i % 2) = normal(rng);
  for (int i = 0; i < b.size(); ++i) b(i / 2, i % 2) = normal(rng);

  const Eigen::MatrixXd kab = uigp::gram_matrix(a, b, hp);
  const Eigen::MatrixXd kba = uigp::gram_matrix(b, a, hp);
  CHECK((kab - kba.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gram rejects mismatched dimensions and non-square noise") {
  auto hp = hp_1d(1.0, 1.0, 0.0);
  Eigen::MatrixXd a(3, 2), b(3, 1);
  a.setZero();
  b.setZero();
  CHECK_THROWS_AS(uigp::gram_matrix(a, b, hp), std::invalid_argument);

  Eigen::MatrixXd c(3, 1), d(2, 1);
  c.setZero();
  d.setZero();
  CHECK_THROWS_AS(uigp::gram_matrix(c, d, hp, true), std::invalid_argument);
}

TEST_CASE("jittered gram is positive definite for random point sets") {
  std::mt19937_64 rng(1234);
  std::normal_distribution<double> normal(0.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 40);
    auto hp = hp_1d(0.5 + 2.0 * std::generate_canonical<double, 53>(rng),
                    0.1 + std::generate_canonical<double, 53>(rng), 0.0);
    Eigen::MatrixXd a(n, 1);
    for (int i = 0; i < n; ++i) a(i, 0) = normal(rng);
    if (trial % 4 == 0) a.row(n - 1) = a.row(0);  // duplicated point, worst case when noise-free

    Eigen::LLT<Eigen::MatrixXd> llt(uigp::gram_matrix(a, a, hp, true));
    CHECK(llt.info() == Eigen::Success);
  }
}

TEST_CASE("covariance decays monotonically with coordinate distance") {
  KernelHyperparams hp;
  hp.signal_variance = 1.0;
  hp.lengthscales = Eigen::VectorXd::Constant(2, 1.0);
  hp.lengthscales << 0.9, 2.2;

  Eigen::VectorXd origin = Eigen::VectorXd::Zero(2);
  for (int j = 0; j < 2; ++j) {
    double prev = uigp::se_ard_covariance(origin, origin, hp);
    for (double step = 0.25; step < 6.0; step += 0.25) {
      Eigen::VectorXd x = origin;
      x[j] = step;
      const double k = uigp::se_ard_covariance(origin, x, hp);
      CHECK(k < prev);
      prev = k;
    }
  }
}

TEST_CASE("joint rescaling of inputs and lengthscales leaves the gram unchanged") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> normal(0.0, 1.0);
  KernelHyperparams hp;
  hp.signal_variance = 1.4;
  hp.lengthscales = Eigen::VectorXd::Constant(2, 1.0);
  hp.lengthscales << 0.6, 1.8;

  Eigen::MatrixXd a(8, 2);
  for (int i = 0; i < a.size(); ++i) a(i / 2, i % 2) = normal(rng);

  const double factor = 37.5;
  KernelHyperparams hp_scaled = hp;
  hp_scaled.lengthscales *= factor;

  const Eigen::MatrixXd k = uigp::gram_matrix(a, a, hp);
  const Eigen::MatrixXd k_scaled = uigp::gram_matrix(factor * a, factor * a, hp_scaled);
  CHECK((k - k_scaled).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("hyperparameter validation") {
  auto hp = hp_1d(1.0, 1.0, 0.0);
  CHECK_NOTHROW(hp.validate());
  hp.signal_variance = 0.0;
  CHECK_THROWS_AS(hp.validate(), std::invalid_argument);
  hp = hp_1d(1.0, -1.0, 0.0);
  CHECK_THROWS_AS(hp.validate(), std::invalid_argument);
  hp = hp_1d(1.0, 1.0, -1e-9);
  CHECK_THROWS_AS(hp.validate(), std::invalid_argument);
}

TEST_CASE("log-vector round trip") {
  KernelHyperparams hp;
  hp.signal_variance = 3.2;
  hp.lengthscales = Eigen::VectorXd::Constant(2, 1.0);
  hp.lengthscales << 0.4, 5.0;
  hp.noise_variance = 1e-3;
  const auto back = uigp::from_log_vector(uigp::to_log_vector(hp));
  CHECK(back.signal_variance == doctest::Approx(hp.signal_variance).epsilon(1e-14));
  CHECK(back.lengthscales[1] == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(back.noise_variance == doctest::Approx(1e-3).epsilon(1e-14));
}

}  // TEST_SUITE
