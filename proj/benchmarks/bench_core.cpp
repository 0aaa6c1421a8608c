#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "uigp/analysis.hpp"
#include "uigp/experiment.hpp"
#include "uigp/gp.hpp"
#include "uigp/mcmc.hpp"
#include "uigp/prediction.hpp"

namespace {

uigp::KernelHyperparams bench_hp() {
  uigp::KernelHyperparams hp;
  hp.signal_variance = 20.0;
  hp.lengthscales = Eigen::VectorXd::Constant(1, 2.0);
  hp.noise_variance = 1e-2;
  return hp;
}

Eigen::MatrixXd random_points(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 25.0);
  Eigen::MatrixXd x(n, 1);
  for (int i = 0; i < n; ++i) x(i, 0) = unif(rng);
  return x;
}

Eigen::VectorXd bench_outputs(const Eigen::MatrixXd& x) {
  Eigen::VectorXd y(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) y[i] = -x(i, 0) * std::sin(x(i, 0) / 3.0);
  return y;
}

uigp::TrainingData bench_data(int n_fixed, int n_uncertain) {
  const Eigen::MatrixXd all = random_points(n_fixed + n_uncertain, 7);
  const Eigen::VectorXd y = bench_outputs(all);
  uigp::TrainingData data;
  data.fixed_inputs = all.topRows(n_fixed);
  data.fixed_outputs = y.head(n_fixed);
  data.uncertain_outputs = y.tail(n_uncertain);
  data.input_prior.means = all.bottomRows(n_uncertain).array() + 0.3;
  data.input_prior.std_devs = Eigen::MatrixXd::Constant(n_uncertain, 1, 1.0);
  return data;
}

void BM_GramMatrix(benchmark::State& state) {
  const auto hp = bench_hp();
  const auto x = random_points(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(uigp::gram_matrix(x, x, hp, true));
}
BENCHMARK(BM_GramMatrix)->Arg(30)->Arg(60)->Arg(120);

void BM_LogMarginalLikelihood(benchmark::State& state) {
  const auto hp = bench_hp();
  const auto x = random_points(static_cast<int>(state.range(0)), 2);
  const auto y = bench_outputs(x);
  for (auto _ : state) benchmark::DoNotOptimize(uigp::log_marginal_likelihood(x, y, hp));
}
BENCHMARK(BM_LogMarginalLikelihood)->Arg(30)->Arg(60)->Arg(120);

void BM_LmlGradient(benchmark::State& state) {
  const auto hp = bench_hp();
  const auto x = random_points(static_cast<int>(state.range(0)), 3);
  const auto y = bench_outputs(x);
  for (auto _ : state) benchmark::DoNotOptimize(uigp::lml_gradient(x, y, hp));
}
BENCHMARK(BM_LmlGradient)->Arg(30)->Arg(60)->Arg(120);

void BM_FitPredict(benchmark::State& state) {
  const auto hp = bench_hp();
  const auto x = random_points(static_cast<int>(state.range(0)), 4);
  const auto y = bench_outputs(x);
  const auto test = random_points(100, 5);
  for (auto _ : state) {
    const auto fit = uigp::gp_fit(x, y, hp);
    benchmark::DoNotOptimize(uigp::gp_predict(fit, test));
  }
}
BENCHMARK(BM_FitPredict)->Arg(30)->Arg(60)->Arg(120);

void BM_PosteriorTargetEval(benchmark::State& state) {
  const auto hp = bench_hp();
  const auto data = bench_data(static_cast<int>(state.range(0)) / 2,
                               static_cast<int>(state.range(0)) / 2);
  const auto target = uigp::make_posterior_target(data, hp);
  for (auto _ : state) benchmark::DoNotOptimize(target(data.input_prior.means));
}
BENCHMARK(BM_PosteriorTargetEval)->Arg(8)->Arg(60);

void BM_Metropolis(benchmark::State& state) {
  const auto hp = bench_hp();
  const auto data = bench_data(4, 4);
  const auto target = uigp::make_posterior_target(data, hp);
  uigp::MetropolisConfig cfg;
  cfg.iterations = static_cast<int>(state.range(0));
  cfg.burn_in = cfg.iterations / 4;
  cfg.thinning = 1;
  cfg.seed = 11;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        uigp::run_metropolis(target, data.input_prior.means, data.input_prior.std_devs, cfg));
}
BENCHMARK(BM_Metropolis)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_MarginalPredict(benchmark::State& state) {
  const auto hp = bench_hp();
  const auto data = bench_data(30, 30);
  const auto test = random_points(100, 6);
  std::mt19937_64 rng(8);
  std::vector<Eigen::MatrixXd> samples;
  for (int s = 0; s < static_cast<int>(state.range(0)); ++s)
    samples.push_back(uigp::sample_prior(data.input_prior, rng));
  for (auto _ : state)
    benchmark::DoNotOptimize(uigp::marginal_predict(samples, data, hp, test));
}
BENCHMARK(BM_MarginalPredict)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_KdeDensity(benchmark::State& state) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd samples(state.range(0));
  for (Eigen::Index i = 0; i < samples.size(); ++i) samples[i] = normal(rng);
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(512, -4.0, 4.0);
  for (auto _ : state) benchmark::DoNotOptimize(uigp::kde_density(samples, grid));
}
BENCHMARK(BM_KdeDensity)->Arg(1000)->Arg(10000);

void BM_Sobol(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(uigp::sobol_sequence(state.range(0), 1));
}
BENCHMARK(BM_Sobol)->Arg(64)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();
