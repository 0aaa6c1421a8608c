#pragma once

#include <Eigen/Dense>
#include <optional>

namespace uigp {

/// Squared-exponential covariance with per-dimension (ARD) lengthscales plus
/// an additive white-noise variance.
struct KernelHyperparams {
  double signal_variance = 1.0;  // sigma_f^2, output units squared
  Eigen::VectorXd lengthscales;  // one positive entry per input dimension
  double noise_variance = 0.0;   // sigma_n^2, output units squared

  Eigen::Index dim() const { return lengthscales.size(); }

  /// Throws std::invalid_argument unless signal_variance > 0, every
  /// lengthscale > 0 and noise_variance >= 0.
  void validate() const;
};

/// Log-space parameterization [log sf2, log l_1..l_d, log sn2] used by the
/// hyperparameter optimizer; positivity is enforced by construction.
Eigen::VectorXd to_log_vector(const KernelHyperparams& hp);
KernelHyperparams from_log_vector(const Eigen::VectorXd& v);

/// k(x1, x2) = sf2 * exp(-1/2 sum_j ((x1_j - x2_j) / l_j)^2)
double se_ard_covariance(const Eigen::Ref<const Eigen::VectorXd>& x1,
                         const Eigen::Ref<const Eigen::VectorXd>& x2,
                         const KernelHyperparams& hp);

/// Diagonal jitter applied to square Gram matrices before factorization:
/// kJitterRelative * max(1, mean diagonal). Applied even when
/// noise_variance > 0 so that noise-free interpolation problems stay
/// factorizable.
inline constexpr double kJitterRelative = 1e-8;
double default_jitter(const KernelHyperparams& hp);

/// Pairwise covariance matrix with entry (i,j) = k(a_i, b_j); rows of a and
/// b are points. With add_noise (a and b must then be the same n-point set)
/// sigma_n^2 plus jitter is added on the diagonal; pass an explicit jitter
/// to override the default.
Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                            const KernelHyperparams& hp, bool add_noise = false,
                            std::optional<double> jitter = std::nullopt);

}  // namespace uigp
