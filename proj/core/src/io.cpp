#include "uigp/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace uigp::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string() + " for reading");
  return in;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_double_or_nan(const std::string& s) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::stod(s);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

void write_dataset_csv(const std::filesystem::path& path, const TrainingData& data,
                       const Eigen::MatrixXd& truth_locations) {
  const Eigen::Index d = data.dim();
  auto out = open_out(path);
  out << "role";
  for (Eigen::Index j = 1; j <= d; ++j) out << ",x_" << j;
  out << ",y";
  for (Eigen::Index j = 1; j <= d; ++j) out << ",prior_mean_" << j;
  for (Eigen::Index j = 1; j <= d; ++j) out << ",prior_std_" << j;
  out << "\n";

  for (Eigen::Index i = 0; i < data.n_fixed(); ++i) {
    out << "fixed";
    for (Eigen::Index j = 0; j < d; ++j) out << "," << format_double(data.fixed_inputs(i, j));
    out << "," << format_double(data.fixed_outputs[i]);
    for (Eigen::Index j = 0; j < 2 * d; ++j) out << ",";
    out << "\n";
  }
  const bool have_truth = truth_locations.rows() == data.n_uncertain();
  for (Eigen::Index i = 0; i < data.n_uncertain(); ++i) {
    out << "uncertain";
    for (Eigen::Index j = 0; j < d; ++j) {
      out << ",";
      if (have_truth && std::isfinite(truth_locations(i, j)))
        out << format_double(truth_locations(i, j));
    }
    out << "," << format_double(data.uncertain_outputs[i]);
    for (Eigen::Index j = 0; j < d; ++j) out << "," << format_double(data.input_prior.means(i, j));
    for (Eigen::Index j = 0; j < d; ++j) out << "," << format_double(data.input_prior.std_devs(i, j));
    out << "\n";
  }
}

DatasetFile read_dataset_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty dataset file");
  const auto header = split_csv_line(line);
  // layout: role, d x columns, y, d prior means, d prior stds
  if (header.size() < 5 || (header.size() - 2) % 3 != 0)
    throw std::runtime_error(path.string() + ": unexpected dataset header");
  const Eigen::Index d = static_cast<Eigen::Index>((header.size() - 2) / 3);

  std::vector<std::vector<double>> fixed_x, unc_truth, unc_mean, unc_std;
  std::vector<double> fixed_y, unc_y;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size())
      throw std::runtime_error(path.string() + ": row has " + std::to_string(f.size()) +
                               " fields, header has " + std::to_string(header.size()));
    std::vector<double> x(d), mean(d), std_dev(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      x[j] = parse_double_or_nan(f[1 + j]);
      mean[j] = parse_double_or_nan(f[2 + d + j]);
      std_dev[j] = parse_double_or_nan(f[2 + 2 * d + j]);
    }
    const double y = parse_double_or_nan(f[1 + d]);
    if (f[0] == "fixed") {
      fixed_x.push_back(x);
      fixed_y.push_back(y);
    } else if (f[0] == "uncertain") {
      unc_truth.push_back(x);
      unc_y.push_back(y);
      unc_mean.push_back(mean);
      unc_std.push_back(std_dev);
    } else {
      throw std::runtime_error(path.string() + ": unknown role '" + f[0] + "'");
    }
  }

  DatasetFile ds;
  const Eigen::Index nf = static_cast<Eigen::Index>(fixed_x.size());
  const Eigen::Index nu = static_cast<Eigen::Index>(unc_y.size());
  ds.data.fixed_inputs.resize(nf, d);
  ds.data.fixed_outputs.resize(nf);
  for (Eigen::Index i = 0; i < nf; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) ds.data.fixed_inputs(i, j) = fixed_x[i][j];
    ds.data.fixed_outputs[i] = fixed_y[i];
  }
  ds.data.uncertain_outputs.resize(nu);
  ds.data.input_prior.means.resize(nu, d);
  ds.data.input_prior.std_devs.resize(nu, d);
  ds.truth_locations.resize(nu, d);
  for (Eigen::Index i = 0; i < nu; ++i) {
    ds.data.uncertain_outputs[i] = unc_y[i];
    for (Eigen::Index j = 0; j < d; ++j) {
      ds.data.input_prior.means(i, j) = unc_mean[i][j];
      ds.data.input_prior.std_devs(i, j) = unc_std[i][j];
      ds.truth_locations(i, j) = unc_truth[i][j];
    }
  }
  return ds;
}

void write_test_csv(const std::filesystem::path& path, const Eigen::MatrixXd& inputs,
                    const Eigen::VectorXd& truth) {
  if (inputs.rows() != truth.size())
    throw std::invalid_argument("write_test_csv: input/truth length mismatch");
  auto out = open_out(path);
  out << "x_1";
  for (Eigen::Index j = 2; j <= inputs.cols(); ++j) out << ",x_" << j;
  out << ",f_truth\n";
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    for (Eigen::Index j = 0; j < inputs.cols(); ++j)
      out << (j ? "," : "") << format_double(inputs(i, j));
    out << "," << format_double(truth[i]) << "\n";
  }
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> read_test_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty test file");
  const Eigen::Index d = static_cast<Eigen::Index>(split_csv_line(line).size()) - 1;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    std::vector<double> row(d + 1);
    for (Eigen::Index j = 0; j <= d; ++j) row[j] = std::stod(f[j]);
    rows.push_back(row);
  }
  Eigen::MatrixXd inputs(rows.size(), d);
  Eigen::VectorXd truth(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) inputs(i, j) = rows[i][j];
    truth[i] = rows[i][d];
  }
  return {inputs, truth};
}

void write_hyperparams_json(const std::filesystem::path& path, const KernelHyperparams& hp) {
  auto out = open_out(path);
  out << "{\n  \"signal_variance\": " << format_double(hp.signal_variance)
      << ",\n  \"lengthscales\": [";
  for (Eigen::Index j = 0; j < hp.lengthscales.size(); ++j)
    out << (j ? ", " : "") << format_double(hp.lengthscales[j]);
  out << "],\n  \"noise_variance\": " << format_double(hp.noise_variance) << "\n}\n";
}

KernelHyperparams read_hyperparams_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  nlohmann::json j = nlohmann::json::parse(in);
  KernelHyperparams hp;
  hp.signal_variance = j.at("signal_variance").get<double>();
  const auto ls = j.at("lengthscales").get<std::vector<double>>();
  hp.lengthscales = Eigen::Map<const Eigen::VectorXd>(ls.data(), static_cast<Eigen::Index>(ls.size()));
  hp.noise_variance = j.at("noise_variance").get<double>();
  hp.validate();
  return hp;
}

void write_chain_csv(const std::filesystem::path& path, const PosteriorChain& chain) {
  auto out = open_out(path);
  out << "sample_index,log_posterior";
  if (!chain.samples.empty()) {
    const auto& first = chain.samples.front();
    for (Eigen::Index i = 1; i <= first.rows(); ++i)
      for (Eigen::Index j = 1; j <= first.cols(); ++j) out << ",x_u_" << i << "_" << j;
  }
  out << "\n";
  for (std::size_t s = 0; s < chain.samples.size(); ++s) {
    out << s << "," << format_double(chain.log_posterior_values[s]);
    const auto& m = chain.samples[s];
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) out << "," << format_double(m(i, j));
    out << "\n";
  }
}

PosteriorChain read_chain_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty chain file");
  const auto header = split_csv_line(line);

  Eigen::Index n_u = 0, d = 0;
  for (std::size_t k = 2; k < header.size(); ++k) {
    int i = 0, j = 0;
    if (std::sscanf(header[k].c_str(), "x_u_%d_%d", &i, &j) != 2)
      throw std::runtime_error(path.string() + ": unexpected chain column '" + header[k] + "'");
    n_u = std::max<Eigen::Index>(n_u, i);
    d = std::max<Eigen::Index>(d, j);
  }

  PosteriorChain chain;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size())
      throw std::runtime_error(path.string() + ": malformed chain row");
    chain.log_posterior_values.push_back(std::stod(f[1]));
    Eigen::MatrixXd m(n_u, d);
    for (Eigen::Index i = 0; i < n_u; ++i)
      for (Eigen::Index j = 0; j < d; ++j) m(i, j) = std::stod(f[2 + i * d + j]);
    chain.samples.push_back(std::move(m));
  }
  return chain;
}

void write_predictive_csv(const std::filesystem::path& path, const PredictiveSummary& s) {
  auto out = open_out(path);
  for (Eigen::Index j = 1; j <= s.test_inputs.cols(); ++j) out << "x_" << j << ",";
  out << "marginal_mean,marginal_variance,band_lo,band_hi\n";
  for (Eigen::Index i = 0; i < s.test_inputs.rows(); ++i) {
    for (Eigen::Index j = 0; j < s.test_inputs.cols(); ++j)
      out << format_double(s.test_inputs(i, j)) << ",";
    const double sd = std::sqrt(s.marginal_variance[i]);
    out << format_double(s.marginal_mean[i]) << "," << format_double(s.marginal_variance[i]) << ","
        << format_double(s.marginal_mean[i] - 2.0 * sd) << ","
        << format_double(s.marginal_mean[i] + 2.0 * sd) << "\n";
  }
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                      const std::string& column_prefix) {
  auto out = open_out(path);
  for (Eigen::Index j = 1; j <= m.cols(); ++j) out << (j > 1 ? "," : "") << column_prefix << j;
  out << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
    out << "\n";
  }
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty matrix file");
  const Eigen::Index cols = static_cast<Eigen::Index>(split_csv_line(line).size());
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    std::vector<double> row(cols);
    for (Eigen::Index j = 0; j < cols; ++j) row[j] = std::stod(f[j]);
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  return m;
}

void write_kde_csv(const std::filesystem::path& path, const Eigen::VectorXd& grid,
                   const Eigen::VectorXd& prior_density, const Eigen::VectorXd& posterior_density) {
  if (grid.size() != prior_density.size() || grid.size() != posterior_density.size())
    throw std::invalid_argument("write_kde_csv: length mismatch");
  auto out = open_out(path);
  out << "grid,prior_density,posterior_density\n";
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    out << format_double(grid[i]) << "," << format_double(prior_density[i]) << ","
        << format_double(posterior_density[i]) << "\n";
}

void write_error_report_json(const std::filesystem::path& path, const ErrorReport& report) {
  auto out = open_out(path);
  out << to_json(report);
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries,
                    const std::string& pipeline_status) {
  auto out = open_out(path);
  out << "status\tstage\tartifact\n";
  for (const auto& e : entries) out << e.status << "\t" << e.stage << "\t" << e.artifact << "\n";
  out << "pipeline " << pipeline_status << "\n";
}

std::pair<ExperimentConfig, std::vector<std::string>> read_experiment_config(
    const std::filesystem::path& path) {
  auto in = open_in(path);
  nlohmann::json j = nlohmann::json::parse(in);

  if (!j.contains("function_id"))
    throw std::runtime_error(path.string() + ": config is missing \"function_id\"");
  ExperimentConfig cfg = ExperimentConfig::defaults_for(
      function_id_from_string(j.at("function_id").get<std::string>()));

  if (j.contains("domain")) {
    const auto dom = j.at("domain").get<std::vector<double>>();
    if (dom.size() != 2) throw std::runtime_error("config: \"domain\" must be [min, max]");
    cfg.domain_min = dom[0];
    cfg.domain_max = dom[1];
  }
  if (j.contains("n_fixed")) cfg.n_fixed = j.at("n_fixed").get<int>();
  if (j.contains("n_uncertain")) cfg.n_uncertain = j.at("n_uncertain").get<int>();
  if (j.contains("n_test")) cfg.n_test = j.at("n_test").get<int>();
  if (j.contains("perturbation")) {
    const auto p = j.at("perturbation").get<std::vector<double>>();
    if (p.size() != 2) throw std::runtime_error("config: \"perturbation\" must be [min, max]");
    cfg.perturbation_min = p[0];
    cfg.perturbation_max = p[1];
  }
  if (j.contains("prior_std")) cfg.prior_std = j.at("prior_std").get<double>();
  if (j.contains("output_noise_std")) cfg.output_noise_std = j.at("output_noise_std").get<double>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("shared_perturbation_seed"))
    cfg.shared_perturbation_seed = j.at("shared_perturbation_seed").get<std::uint64_t>();
  if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
  if (j.contains("max_prediction_samples"))
    cfg.max_prediction_samples = j.at("max_prediction_samples").get<int>();
  if (j.contains("max_lengthscale_fraction")) {
    if (j.at("max_lengthscale_fraction").is_null())
      cfg.max_lengthscale_fraction = std::nullopt;
    else
      cfg.max_lengthscale_fraction = j.at("max_lengthscale_fraction").get<double>();
  }

  if (j.contains("mcmc")) {
    const auto& m = j.at("mcmc");
    if (m.contains("iterations")) cfg.mcmc.iterations = m.at("iterations").get<int>();
    if (m.contains("burn_in")) cfg.mcmc.burn_in = m.at("burn_in").get<int>();
    if (m.contains("thinning")) cfg.mcmc.thinning = m.at("thinning").get<int>();
    if (m.contains("step_scale")) cfg.mcmc.step_scale = m.at("step_scale").get<double>();
    if (m.contains("adapt_during_burn_in"))
      cfg.mcmc.adapt_during_burn_in = m.at("adapt_during_burn_in").get<bool>();
    if (m.contains("seed")) cfg.mcmc.seed = m.at("seed").get<std::uint64_t>();
    if (m.contains("chains")) cfg.mcmc.chains = m.at("chains").get<int>();
  }

  cfg.validate();  // rejects degenerate prior_std etc. at parse time
  std::vector<std::string> warnings = cfg.mcmc.validate();
  return {cfg, warnings};
}

}  // namespace uigp::io
