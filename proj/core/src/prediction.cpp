#include "uigp/prediction.hpp"

#include <random>
#include <stdexcept>
#include <string>

#include "uigp/errors.hpp"
#include "parallel.hpp"

namespace uigp {

namespace {

constexpr double kMaxDroppedFraction = 0.05;

}  // namespace

PredictiveSummary marginal_predict(const std::vector<Eigen::MatrixXd>& samples,
                                   const TrainingData& data, const KernelHyperparams& hp,
                                   const Eigen::MatrixXd& test_inputs, int threads,
                                   PredictiveSource source) {
  data.validate();
  hp.validate();
  if (samples.empty()) throw std::invalid_argument("marginal_predict: need at least one sample");
  if (test_inputs.rows() < 1) throw std::invalid_argument("marginal_predict: no test inputs");

  const Eigen::Index s_total = static_cast<Eigen::Index>(samples.size());
  const Eigen::Index m = test_inputs.rows();
  const Eigen::VectorXd outputs = data.stacked_outputs();

  Eigen::MatrixXd means(s_total, m);
  Eigen::MatrixXd variances(s_total, m);
  std::vector<char> ok(s_total, 0);

  detail::parallel_for_index(s_total, threads, [&](Eigen::Index s) {
    try {
      const FittedGP fit = gp_fit(data.stacked_inputs(samples[s]), outputs, hp);
      const GpPrediction pred = gp_predict(fit, test_inputs);
      means.row(s) = pred.mean.transpose();
      variances.row(s) = pred.variance.transpose();
      ok[s] = 1;
    } catch (const IllConditionedKernelError&) {
      ok[s] = 0;
    }
  });

  Eigen::Index surviving = 0;
  for (Eigen::Index s = 0; s < s_total; ++s) surviving += ok[s];
  const Eigen::Index dropped = s_total - surviving;
  if (surviving == 0)
    throw PredictionFailedError("marginal_predict: every per-sample GP fit was ill-conditioned");
  if (static_cast<double>(dropped) > kMaxDroppedFraction * static_cast<double>(s_total))
    throw PredictionFailedError("marginal_predict: dropped " + std::to_string(dropped) + " of " +
                                std::to_string(s_total) +
                                " samples for ill-conditioning (cap is 5%)");

  PredictiveSummary out;
  out.test_inputs = test_inputs;
  out.source = source;
  out.dropped_samples = static_cast<int>(dropped);
  out.per_sample_means.resize(surviving, m);
  out.per_sample_variances.resize(surviving, m);
  for (Eigen::Index s = 0, row = 0; s < s_total; ++s) {
    if (!ok[s]) continue;
    out.per_sample_means.row(row) = means.row(s);
    out.per_sample_variances.row(row) = variances.row(s);
    ++row;
  }

  out.marginal_mean = out.per_sample_means.colwise().mean().transpose();
  const Eigen::MatrixXd centered = out.per_sample_means.rowwise() - out.marginal_mean.transpose();
  // within-sample average plus between-sample spread (population divisor S)
  out.marginal_variance =
      out.per_sample_variances.colwise().mean().transpose() +
      (centered.colwise().squaredNorm() / static_cast<double>(surviving)).transpose();
  return out;
}

PredictiveSummary prior_marginal_predict(const InputPrior& prior, int sample_count,
                                         const TrainingData& data, const KernelHyperparams& hp,
                                         const Eigen::MatrixXd& test_inputs, std::uint64_t seed,
                                         int threads) {
  prior.validate();
  if (sample_count < 1) throw std::invalid_argument("prior_marginal_predict: sample_count must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<Eigen::MatrixXd> draws;
  draws.reserve(sample_count);
  for (int s = 0; s < sample_count; ++s) draws.push_back(sample_prior(prior, rng));
  return marginal_predict(draws, data, hp, test_inputs, threads, PredictiveSource::prior);
}

}  // namespace uigp
