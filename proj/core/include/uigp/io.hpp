#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "uigp/analysis.hpp"
#include "uigp/experiment.hpp"
#include "uigp/gp.hpp"
#include "uigp/mcmc.hpp"
#include "uigp/prediction.hpp"

namespace uigp::io {

// All writers emit doubles with 17 significant digits, so values round-trip
// exactly and identical runs produce byte-identical files.

/// dataset.csv: role,x_1..x_d,y,prior_mean_1..,prior_std_1.. — fixed rows
/// leave the prior columns empty; uncertain rows carry the true location in
/// the x columns when it is known (synthetic data), else empty.
void write_dataset_csv(const std::filesystem::path& path, const TrainingData& data,
                       const Eigen::MatrixXd& truth_locations);

struct DatasetFile {
  TrainingData data;
  Eigen::MatrixXd truth_locations;  // NaN entries where the truth was absent
};
DatasetFile read_dataset_csv(const std::filesystem::path& path);

/// test.csv: x_1..x_d,f_truth
void write_test_csv(const std::filesystem::path& path, const Eigen::MatrixXd& inputs,
                    const Eigen::VectorXd& truth);
std::pair<Eigen::MatrixXd, Eigen::VectorXd> read_test_csv(const std::filesystem::path& path);

/// hyperparams.json: {"signal_variance", "lengthscales", "noise_variance"}
void write_hyperparams_json(const std::filesystem::path& path, const KernelHyperparams& hp);
KernelHyperparams read_hyperparams_json(const std::filesystem::path& path);

/// chain.csv: sample_index,log_posterior,x_u_1_1,..,x_u_{Nu}_{d} (point
/// index first, then coordinate, both 1-based).
void write_chain_csv(const std::filesystem::path& path, const PosteriorChain& chain);
/// Restores samples and log-posterior values; sampler config and acceptance
/// bookkeeping are not stored in the CSV.
PosteriorChain read_chain_csv(const std::filesystem::path& path);

/// predictive_{prior,posterior}.csv:
/// x_1..x_d,marginal_mean,marginal_variance,band_lo,band_hi with the +/- 2
/// std-dev band precomputed.
void write_predictive_csv(const std::filesystem::path& path, const PredictiveSummary& summary);

/// Plain numeric matrix with a generated header; used for the per-sample
/// moment matrices consumed by `uigp report`.
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                      const std::string& column_prefix);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

/// kde_x_u_{i}_{j}.csv: grid,prior_density,posterior_density
void write_kde_csv(const std::filesystem::path& path, const Eigen::VectorXd& grid,
                   const Eigen::VectorXd& prior_density, const Eigen::VectorXd& posterior_density);

void write_error_report_json(const std::filesystem::path& path, const ErrorReport& report);

struct ManifestEntry {
  std::string stage;
  std::string artifact;
  std::string status;  // "ok" or "failed"
};
/// MANIFEST: tab-separated status/stage/artifact lines followed by a final
/// "pipeline complete" or "pipeline failed <stage>" line.
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries,
                    const std::string& pipeline_status);

/// Parses an ExperimentConfig from a JSON file; missing keys fall back to
/// the per-function defaults. Returns non-fatal warnings (e.g. a retained
/// sample count below 100).
std::pair<ExperimentConfig, std::vector<std::string>> read_experiment_config(
    const std::filesystem::path& path);

std::string format_double(double v);

}  // namespace uigp::io
