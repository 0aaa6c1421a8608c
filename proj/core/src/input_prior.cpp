#include "uigp/input_prior.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace uigp {

void InputPrior::validate() const {
  if (means.rows() != std_devs.rows() || means.cols() != std_devs.cols())
    throw std::invalid_argument("InputPrior: means are " + std::to_string(means.rows()) + "x" +
                                std::to_string(means.cols()) + " but std_devs are " +
                                std::to_string(std_devs.rows()) + "x" +
                                std::to_string(std_devs.cols()));
  if ((std_devs.array() <= 0.0).any() || !std_devs.allFinite())
    throw std::invalid_argument("InputPrior: all std_devs must be positive and finite");
  if (!means.allFinite()) throw std::invalid_argument("InputPrior: means must be finite");
}

double log_prior_density(const Eigen::MatrixXd& candidate, const InputPrior& prior) {
  if (candidate.rows() != prior.means.rows() || candidate.cols() != prior.means.cols())
    throw std::invalid_argument("log_prior_density: candidate is " + std::to_string(candidate.rows()) +
                                "x" + std::to_string(candidate.cols()) + ", prior expects " +
                                std::to_string(prior.means.rows()) + "x" +
                                std::to_string(prior.means.cols()));
  if (candidate.size() == 0) return 0.0;

  const auto z = (candidate - prior.means).array() / prior.std_devs.array();
  const double quad = 0.5 * z.square().sum();
  const double norm =
      0.5 * std::log(2.0 * std::numbers::pi) * static_cast<double>(candidate.size()) +
      prior.std_devs.array().log().sum();
  return -quad - norm;
}

Eigen::MatrixXd sample_prior(const InputPrior& prior, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd draw(prior.means.rows(), prior.means.cols());
  for (Eigen::Index i = 0; i < draw.rows(); ++i)
    for (Eigen::Index j = 0; j < draw.cols(); ++j)
      draw(i, j) = prior.means(i, j) + prior.std_devs(i, j) * normal(rng);
  return draw;
}

}  // namespace uigp
