#include "uigp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "uigp/errors.hpp"

namespace uigp {

namespace {

void check_truth_shape(const Eigen::MatrixXd& truth, Eigen::Index rows, Eigen::Index cols,
                       const char* where) {
  if (truth.rows() != rows || truth.cols() != cols)
    throw std::invalid_argument(std::string(where) + ": truth is " + std::to_string(truth.rows()) +
                                "x" + std::to_string(truth.cols()) + ", expected " +
                                std::to_string(rows) + "x" + std::to_string(cols));
}

// Linear-interpolation quantile of a sorted copy.
double quantile(Eigen::VectorXd sorted, double p) {
  std::sort(sorted.begin(), sorted.end());
  const double h = p * static_cast<double>(sorted.size() - 1);
  const Eigen::Index lo = static_cast<Eigen::Index>(std::floor(h));
  const Eigen::Index hi = std::min<Eigen::Index>(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

double input_mse(const InputPrior& prior, const Eigen::MatrixXd& truth, bool include_prior_variance) {
  prior.validate();
  check_truth_shape(truth, prior.means.rows(), prior.means.cols(), "input_mse");
  if (prior.n_uncertain() == 0) throw std::invalid_argument("input_mse: no uncertain points");

  double total = (prior.means - truth).squaredNorm();
  if (include_prior_variance) total += prior.std_devs.squaredNorm();
  return total / static_cast<double>(prior.n_uncertain());
}

double input_mse(const std::vector<Eigen::MatrixXd>& samples, const Eigen::MatrixXd& truth) {
  if (samples.empty()) throw std::invalid_argument("input_mse: empty sample list");
  check_truth_shape(truth, samples.front().rows(), samples.front().cols(), "input_mse");
  if (truth.rows() == 0) throw std::invalid_argument("input_mse: no uncertain points");

  double total = 0.0;
  for (const auto& s : samples) total += (s - truth).squaredNorm();
  return total / static_cast<double>(samples.size()) / static_cast<double>(truth.rows());
}

double mspe(const Eigen::MatrixXd& per_sample_means, const Eigen::MatrixXd& per_sample_variances,
            const Eigen::VectorXd& truth_values) {
  if (per_sample_means.rows() != per_sample_variances.rows() ||
      per_sample_means.cols() != per_sample_variances.cols())
    throw std::invalid_argument("mspe: per-sample mean/variance shapes differ");
  if (per_sample_means.cols() != truth_values.size())
    throw std::invalid_argument("mspe: " + std::to_string(per_sample_means.cols()) +
                                " test columns vs " + std::to_string(truth_values.size()) +
                                " truth values");
  if (per_sample_means.size() == 0) throw std::invalid_argument("mspe: empty per-sample moments");

  const Eigen::MatrixXd bias = per_sample_means.rowwise() - truth_values.transpose();
  const double total = bias.array().square().sum() + per_sample_variances.sum();
  return total / static_cast<double>(per_sample_means.rows()) /
         static_cast<double>(per_sample_means.cols());
}

double mspe(const PredictiveSummary& summary, const Eigen::VectorXd& truth_values) {
  return mspe(summary.per_sample_means, summary.per_sample_variances, truth_values);
}

double silverman_bandwidth(const Eigen::VectorXd& samples) {
  const Eigen::Index n = samples.size();
  if (n < 2) throw std::invalid_argument("silverman_bandwidth: need at least 2 samples");
  const double mean = samples.mean();
  const double sd = std::sqrt((samples.array() - mean).square().sum() / static_cast<double>(n - 1));
  const double iqr = quantile(samples, 0.75) - quantile(samples, 0.25);
  const double spread = std::min(sd, iqr / 1.34);
  const double h = 1.06 * spread * std::pow(static_cast<double>(n), -0.2);
  if (!(h > 0.0) || !std::isfinite(h))
    throw DegenerateBandwidthError(
        "silverman_bandwidth: samples have zero spread; pass an explicit bandwidth");
  return h;
}

Eigen::VectorXd kde_density(const Eigen::VectorXd& samples, const Eigen::VectorXd& grid,
                            std::optional<double> bandwidth) {
  if (samples.size() < 1) throw std::invalid_argument("kde_density: no samples");
  double h = 0.0;
  if (bandwidth) {
    if (!(*bandwidth > 0.0)) throw std::invalid_argument("kde_density: bandwidth must be positive");
    h = *bandwidth;
  } else {
    h = silverman_bandwidth(samples);
  }

  const double norm = 1.0 / (static_cast<double>(samples.size()) * h * std::sqrt(2.0 * std::numbers::pi));
  Eigen::VectorXd density(grid.size());
  for (Eigen::Index g = 0; g < grid.size(); ++g) {
    const auto z = (samples.array() - grid[g]) / h;
    density[g] = norm * (-0.5 * z.square()).exp().sum();
  }
  return density;
}

double relative_reduction(double prior_err, double post_err) {
  if (!(prior_err > 0.0))
    throw std::invalid_argument("relative_reduction: prior error must be positive, got " +
                                std::to_string(prior_err));
  return 100.0 * (prior_err - post_err) / prior_err;
}

std::string to_json(const ErrorReport& r) {
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  std::string out = "{\n";
  out += "  \"input_mse_prior\": " + num(r.input_mse_prior) + ",\n";
  out += "  \"input_mse_posterior\": " + num(r.input_mse_posterior) + ",\n";
  out += "  \"mspe_prior\": " + num(r.mspe_prior) + ",\n";
  out += "  \"mspe_posterior\": " + num(r.mspe_posterior) + ",\n";
  out += "  \"relative_reduction_inputs\": " + num(r.relative_reduction_inputs) + ",\n";
  out += "  \"relative_reduction_mspe\": " + num(r.relative_reduction_mspe) + "\n";
  out += "}\n";
  return out;
}

}  // namespace uigp
