#include "uigp/kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace uigp {

void KernelHyperparams::validate() const {
  if (!(signal_variance > 0.0) || !std::isfinite(signal_variance))
    throw std::invalid_argument("KernelHyperparams: signal_variance must be positive, got " +
                                std::to_string(signal_variance));
  if (lengthscales.size() == 0)
    throw std::invalid_argument("KernelHyperparams: lengthscales are empty");
  for (Eigen::Index j = 0; j < lengthscales.size(); ++j) {
    if (!(lengthscales[j] > 0.0) || !std::isfinite(lengthscales[j]))
      throw std::invalid_argument("KernelHyperparams: lengthscale " + std::to_string(j) +
                                  " must be positive, got " + std::to_string(lengthscales[j]));
  }
  if (noise_variance < 0.0 || !std::isfinite(noise_variance))
    throw std::invalid_argument("KernelHyperparams: noise_variance must be nonnegative, got " +
                                std::to_string(noise_variance));
}

Eigen::VectorXd to_log_vector(const KernelHyperparams& hp) {
  Eigen::VectorXd v(hp.dim() + 2);
  v[0] = std::log(hp.signal_variance);
  v.segment(1, hp.dim()) = hp.lengthscales.array().log();
  v[hp.dim() + 1] = std::log(hp.noise_variance);
  return v;
}

KernelHyperparams from_log_vector(const Eigen::VectorXd& v) {
  if (v.size() < 3)
    throw std::invalid_argument("from_log_vector: need at least 3 entries, got " +
                                std::to_string(v.size()));
  KernelHyperparams hp;
  hp.signal_variance = std::exp(v[0]);
  hp.lengthscales = v.segment(1, v.size() - 2).array().exp();
  hp.noise_variance = std::exp(v[v.size() - 1]);
  return hp;
}

double se_ard_covariance(const Eigen::Ref<const Eigen::VectorXd>& x1,
                         const Eigen::Ref<const Eigen::VectorXd>& x2,
                         const KernelHyperparams& hp) {
  if (x1.size() != hp.dim() || x2.size() != hp.dim())
    throw std::invalid_argument("se_ard_covariance: point dimensions (" + std::to_string(x1.size()) +
                                ", " + std::to_string(x2.size()) + ") do not match " +
                                std::to_string(hp.dim()) + " lengthscales");
  const double z = ((x1 - x2).array() / hp.lengthscales.array()).square().sum();
  return hp.signal_variance * std::exp(-0.5 * z);
}

double default_jitter(const KernelHyperparams& hp) {
  // k(x,x) = sf2, so the mean diagonal of the noise-augmented Gram is sf2 + sn2.
  return kJitterRelative * std::max(1.0, hp.signal_variance + hp.noise_variance);
}

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                            const KernelHyperparams& hp, bool add_noise,
                            std::optional<double> jitter) {
  if (a.cols() != hp.dim() || b.cols() != hp.dim())
    throw std::invalid_argument("gram_matrix: input sets have " + std::to_string(a.cols()) + " and " +
                                std::to_string(b.cols()) + " columns, expected " +
                                std::to_string(hp.dim()));
  if (add_noise && a.rows() != b.rows())
    throw std::invalid_argument("gram_matrix: add_noise requires a square matrix over one input set");

  const Eigen::RowVectorXd inv_ls = hp.lengthscales.cwiseInverse().transpose();
  const Eigen::MatrixXd sa = a.array().rowwise() * inv_ls.array();
  const Eigen::MatrixXd sb = b.array().rowwise() * inv_ls.array();

  Eigen::MatrixXd sq = -2.0 * sa * sb.transpose();
  sq.colwise() += sa.rowwise().squaredNorm();
  sq.rowwise() += sb.rowwise().squaredNorm().transpose();
  sq = sq.cwiseMax(0.0);  // guard round-off for near-coincident points

  Eigen::MatrixXd k = hp.signal_variance * (-0.5 * sq.array()).exp();
  if (add_noise) {
    const double j = jitter.value_or(default_jitter(hp));
    k.diagonal().array() += hp.noise_variance + j;
  }
  return k;
}

}  // namespace uigp
