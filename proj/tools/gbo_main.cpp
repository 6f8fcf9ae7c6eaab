#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gbo/acquisition.hpp"
#include "gbo/benchmarks.hpp"
#include "gbo/covariance.hpp"
#include "gbo/errors.hpp"
#include "gbo/graph.hpp"
#include "gbo/harness.hpp"
#include "gbo/io.hpp"
#include "gbo/mle.hpp"
#include "gbo/point_cloud.hpp"
#include "gbo/rng.hpp"

namespace {

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "name",         "cloud",        "cloud_file",   "n",           "subsample_n",
      "intrinsic_dim", "h_mode",      "h_coeff",      "h_value",     "k_n",
      "family",       "prior_kappa2", "prior_s",      "prior_tau",   "truth",
      "truth_family", "truth_kappa2", "truth_s",      "truth_tau",   "truth_k",
      "fine_h_mode",  "fine_h_coeff", "fine_h_value", "mgp_k",       "noise_mode",
      "noise_level",  "noise_sd",     "b_mode",       "delta",       "a",
      "epsilon_n",    "recommend",    "acq_subsample", "L",          "trials",
      "seed",         "methods",      "ml_stride",    "ml_grid_lo",  "ml_grid_hi",
      "ml_grid_count", "zeta",        "t",            "heat_lmax",   "heat_noise_sd",
      "z_star_index"};
  return keys;
}

// every config key doubles as a flag (underscores become dashes); flags win
// over file values
void add_config_flags(CLI::App* cmd, std::map<std::string, std::string>& overrides) {
  for (const auto& key : config_keys()) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    cmd->add_option(
        flag,
        [&overrides, key](const CLI::results_t& values) {
          overrides[key] = values.back();
          return true;
        },
        "config key " + key);
  }
  cmd->add_option(
      "--set",
      [&overrides](const CLI::results_t& values) {
        for (const auto& assignment : values) {
          const auto eq = assignment.find('=');
          if (eq == std::string::npos || eq == 0) return false;
          overrides[assignment.substr(0, eq)] = assignment.substr(eq + 1);
        }
        return true;
      },
      "raw key=value override, repeatable")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
}

struct CloudFlags {
  std::string kind = "circle";
  std::string file;
  int n = 500;
  int subsample = 0;
  int intrinsic_dim = 1;
  std::uint64_t seed = 1;
};

void add_cloud_flags(CLI::App* cmd, CloudFlags& flags) {
  cmd->add_option("--cloud", flags.kind, "circle, sphere, or file")->capture_default_str();
  cmd->add_option("--cloud-file", flags.file, "point cloud path when --cloud file");
  cmd->add_option("--n", flags.n, "number of sampled points")->capture_default_str();
  cmd->add_option("--subsample", flags.subsample, "seeded subsample size for file clouds")
      ->capture_default_str();
  cmd->add_option("--intrinsic-dim", flags.intrinsic_dim, "manifold dimension m")
      ->capture_default_str();
  cmd->add_option("--seed", flags.seed, "master seed")->capture_default_str();
}

gbo::PointCloud build_cloud(const CloudFlags& flags) {
  const std::uint64_t cloud_seed = gbo::derive_seed(flags.seed, "cloud", 0);
  if (flags.kind == "circle") return gbo::sample_circle(flags.n, cloud_seed);
  if (flags.kind == "sphere") return gbo::sample_sphere(flags.n, cloud_seed);
  if (flags.kind != "file")
    throw std::invalid_argument("unknown cloud kind '" + flags.kind + "'");
  if (flags.file.empty()) throw std::invalid_argument("--cloud file needs --cloud-file");
  gbo::PointCloud cloud = gbo::load_point_cloud(flags.file, flags.intrinsic_dim);
  if (flags.subsample > 0 && flags.subsample < cloud.size())
    cloud = gbo::subsample(cloud, flags.subsample, cloud_seed);
  return cloud;
}

struct GraphFlags {
  std::string h_mode = "experiment";
  double h_coeff = 4.0;
  double h_value = 0.0;
  int k = 20;
};

void add_graph_flags(CLI::App* cmd, GraphFlags& flags) {
  cmd->add_option("--h-mode", flags.h_mode, "experiment, theory, or absolute")
      ->capture_default_str();
  cmd->add_option("--h-coeff", flags.h_coeff, "connectivity coefficient")->capture_default_str();
  cmd->add_option("--h-value", flags.h_value, "absolute connectivity radius");
  cmd->add_option("--k", flags.k, "number of eigenpairs")->capture_default_str();
}

gbo::ConnectivityRule to_rule(const GraphFlags& flags) {
  gbo::ConnectivityRule rule;
  if (flags.h_mode == "experiment") {
    rule.mode = gbo::HMode::experiment;
  } else if (flags.h_mode == "theory") {
    rule.mode = gbo::HMode::theory;
  } else if (flags.h_mode == "absolute") {
    rule.absolute = true;
  } else {
    throw std::invalid_argument("unknown h mode '" + flags.h_mode + "'");
  }
  rule.coeff = flags.h_coeff;
  rule.value = flags.h_value;
  return rule;
}

gbo::GraphSpectrum build_spectrum(const gbo::PointCloud& cloud, const GraphFlags& flags) {
  const double h = gbo::resolve_connectivity(to_rule(flags), cloud);
  const auto graph = gbo::build_weight_matrix(cloud, h);
  return gbo::spectrum(gbo::laplacian(graph), flags.k);
}

struct KernelFlags {
  std::string family = "matern";
  double kappa2 = 1.0;
  double s = 2.0;
  double tau = 0.1;
  int k_n = 20;
};

void add_kernel_flags(CLI::App* cmd, KernelFlags& flags) {
  cmd->add_option("--family", flags.family, "matern or se")->capture_default_str();
  cmd->add_option("--kappa2", flags.kappa2, "matern kappa^2")->capture_default_str();
  cmd->add_option("--s", flags.s, "matern smoothness")->capture_default_str();
  cmd->add_option("--tau", flags.tau, "se length-scale")->capture_default_str();
  cmd->add_option("--k-n", flags.k_n, "spectral truncation")->capture_default_str();
}

gbo::KernelSpec to_spec(const KernelFlags& flags, int intrinsic_dim) {
  gbo::KernelSpec spec;
  if (flags.family == "matern") {
    spec.family = gbo::KernelFamily::matern;
  } else if (flags.family == "se") {
    spec.family = gbo::KernelFamily::se;
  } else {
    throw std::invalid_argument("unknown kernel family '" + flags.family + "'");
  }
  spec.kappa = std::sqrt(flags.kappa2);
  spec.s = flags.s;
  spec.tau = flags.tau;
  spec.k_n = flags.k_n;
  spec.m = intrinsic_dim;
  return spec;
}

void emit(const std::string& out, const std::string& content) {
  if (out.empty())
    std::cout << content;
  else
    gbo::write_text_atomic(out, content);
}

int run_sample(const CloudFlags& cloud_flags, const GraphFlags& graph_flags,
               const KernelFlags& kernel_flags, const std::string& draw,
               std::uint64_t draw_seed, const std::string& out) {
  const gbo::PointCloud cloud = build_cloud(cloud_flags);
  if (draw == "cloud") {
    if (out.empty()) {
      std::ostringstream buffer;
      for (int i = 0; i < cloud.size(); ++i) {
        for (int d = 0; d < cloud.ambient_dim(); ++d) {
          if (d) buffer << ' ';
          buffer << gbo::format_double(cloud.points(i, d));
        }
        buffer << '\n';
      }
      std::cout << buffer.str();
    } else {
      gbo::save_point_cloud(cloud, out);
    }
    return 0;
  }
  Eigen::VectorXd values;
  if (draw == "graph") {
    const auto spectrum = build_spectrum(cloud, graph_flags);
    const auto model =
        gbo::make_graph_model(spectrum, to_spec(kernel_flags, cloud_flags.intrinsic_dim));
    values = gbo::sample_prior(model, draw_seed);
  } else if (draw == "oracle") {
    const auto spec = to_spec(kernel_flags, cloud_flags.intrinsic_dim);
    values = gbo::sample_prior(gbo::circle_oracle(cloud, spec.k_n, spec), draw_seed);
  } else {
    throw std::invalid_argument("unknown draw kind '" + draw + "'");
  }
  std::ostringstream buffer;
  for (int i = 0; i < cloud.size(); ++i) {
    for (int d = 0; d < cloud.ambient_dim(); ++d)
      buffer << gbo::format_double(cloud.points(i, d)) << ' ';
    buffer << gbo::format_double(values[i]) << '\n';
  }
  emit(out, buffer.str());
  return 0;
}

int run_spectrum(const CloudFlags& cloud_flags, const GraphFlags& graph_flags, bool suggest,
                 const std::string& out) {
  const gbo::PointCloud cloud = build_cloud(cloud_flags);
  const auto spectrum = build_spectrum(cloud, graph_flags);
  std::ostringstream buffer;
  buffer << "index,eigenvalue\n";
  for (int i = 0; i < spectrum.k(); ++i)
    buffer << (i + 1) << ',' << gbo::format_double(spectrum.eigenvalues[i]) << '\n';
  emit(out, buffer.str());
  if (suggest) {
    std::vector<double> eigenvalues(spectrum.eigenvalues.data(),
                                    spectrum.eigenvalues.data() + spectrum.k());
    std::cerr << "suggested truncation: " << gbo::detect_saturation(eigenvalues) << '\n';
  }
  return 0;
}

gbo::ExperimentConfig config_from(const std::string& config_path,
                                  const std::map<std::string, std::string>& overrides) {
  std::map<std::string, std::string> entries;
  if (!config_path.empty()) entries = gbo::parse_config_file(config_path);
  for (const auto& [key, value] : overrides) entries[key] = value;
  return gbo::parse_experiment_config(entries);
}

int run_experiment_cmd(const std::string& config_path,
                       const std::map<std::string, std::string>& overrides,
                       const std::string& out_dir, int jobs, bool verbose) {
  const gbo::ExperimentConfig config = config_from(config_path, overrides);
  gbo::RunOptions options;
  options.out_dir = out_dir;
  options.jobs = jobs;
  options.verbose = verbose;
  const auto result = gbo::run_experiment(config, options);
  for (const auto& method : result.methods) {
    std::cout << method.method;
    if (method.mean.size() > 0)
      std::cout << " final_mean=" << gbo::format_double(method.mean[method.mean.size() - 1]);
    if (method.failures > 0) std::cout << " failures=" << method.failures;
    std::cout << '\n';
  }
  return 0;
}

int run_optimize(const std::string& config_path, std::map<std::string, std::string> overrides,
                 const std::string& method, const std::string& out, bool verbose) {
  overrides["trials"] = "1";
  overrides["methods"] = method;
  const gbo::ExperimentConfig config = config_from(config_path, overrides);
  gbo::RunOptions options;
  options.verbose = verbose;
  const auto result = gbo::run_experiment(config, options);
  const auto& trial = result.methods.at(0).trials.at(0);
  if (trial.failed()) throw std::runtime_error(trial.error);
  if (!out.empty()) gbo::write_run_record_csv(trial.record, out);
  const double best = std::max(trial.record.init_observation,
                               trial.record.observations.maxCoeff());
  std::cout << "recommendation=" << trial.record.recommendation
            << " best_observed=" << gbo::format_double(best)
            << " final=" << gbo::format_double(trial.trace[trial.trace.size() - 1]) << '\n';
  return 0;
}

int run_estimate(const std::string& run_path, const CloudFlags& cloud_flags,
                 const GraphFlags& graph_flags, const KernelFlags& kernel_flags,
                 double noise_sd, double grid_lo, double grid_hi, int grid_count,
                 const std::string& out) {
  std::ifstream in(run_path);
  if (!in) throw std::runtime_error("cannot open run record '" + run_path + "'");
  std::vector<int> queries;
  std::vector<double> observations;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::istringstream fields(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    if (cells.size() < 3) throw std::runtime_error("malformed run record line: " + line);
    queries.push_back(std::stoi(cells[1]));
    observations.push_back(std::stod(cells[2]));
  }
  if (queries.empty()) throw std::runtime_error("run record has no observations");

  const gbo::PointCloud cloud = build_cloud(cloud_flags);
  const auto spectrum = build_spectrum(cloud, graph_flags);
  gbo::KernelSpec base = to_spec(kernel_flags, cloud_flags.intrinsic_dim);
  const Eigen::VectorXd grid = grid_lo > 0.0 && grid_hi > grid_lo
                                   ? gbo::log_spaced_grid(grid_lo, grid_hi, grid_count)
                                   : gbo::default_grid(base.family);

  std::ostringstream buffer;
  buffer << "iteration,estimate,nll\n";
  for (std::size_t ell = 1; ell <= queries.size(); ++ell) {
    const std::vector<int> prefix(queries.begin(), queries.begin() + ell);
    const Eigen::VectorXd y =
        Eigen::Map<const Eigen::VectorXd>(observations.data(), static_cast<Eigen::Index>(ell));
    const auto fit = gbo::estimate(spectrum, base, prefix, y, noise_sd, grid);
    buffer << ell << ',' << gbo::format_double(fit.parameter) << ','
           << gbo::format_double(fit.nll) << '\n';
  }
  emit(out, buffer.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian optimization on point-cloud manifolds"};
  app.require_subcommand(1);

  auto* sample = app.add_subcommand("sample", "generate point clouds and prior draws");
  CloudFlags sample_cloud;
  GraphFlags sample_graph;
  KernelFlags sample_kernel;
  std::string sample_draw = "cloud";
  std::uint64_t sample_draw_seed = 1;
  std::string sample_out;
  add_cloud_flags(sample, sample_cloud);
  add_graph_flags(sample, sample_graph);
  add_kernel_flags(sample, sample_kernel);
  sample->add_option("--draw", sample_draw, "cloud, graph, or oracle")->capture_default_str();
  sample->add_option("--draw-seed", sample_draw_seed, "seed for the prior draw")
      ->capture_default_str();
  sample->add_option("--out", sample_out, "output path (stdout when omitted)");

  auto* spectrum_cmd = app.add_subcommand("spectrum", "graph Laplacian eigenvalues as CSV");
  CloudFlags spectrum_cloud;
  GraphFlags spectrum_graph;
  bool spectrum_suggest = false;
  std::string spectrum_out;
  add_cloud_flags(spectrum_cmd, spectrum_cloud);
  add_graph_flags(spectrum_cmd, spectrum_graph);
  spectrum_cmd->add_flag("--suggest-k", spectrum_suggest,
                         "print a saturation-based truncation suggestion to stderr");
  spectrum_cmd->add_option("--out", spectrum_out, "output path (stdout when omitted)");

  auto* optimize = app.add_subcommand("optimize", "single optimization run on an objective");
  std::map<std::string, std::string> optimize_overrides;
  std::string optimize_config;
  std::string optimize_method = "ggp";
  std::string optimize_out;
  bool optimize_verbose = false;
  optimize->add_option("--config", optimize_config, "experiment config file");
  add_config_flags(optimize, optimize_overrides);
  optimize->add_option("--method", optimize_method, "mgp, ggp, ggp-ml, egp:<...>, or random")
      ->capture_default_str();
  optimize->add_option("--out", optimize_out, "run record CSV path");
  optimize->add_flag("--verbose", optimize_verbose, "progress lines on stderr");

  auto* experiment = app.add_subcommand("experiment", "multi-trial experiment from a config");
  std::map<std::string, std::string> experiment_overrides;
  std::string experiment_config;
  std::string experiment_out;
  int experiment_jobs = 1;
  bool experiment_verbose = false;
  experiment->add_option("--config", experiment_config, "experiment config file");
  add_config_flags(experiment, experiment_overrides);
  experiment->add_option("--out", experiment_out, "output directory");
  experiment->add_option("--jobs", experiment_jobs, "worker threads")->capture_default_str();
  experiment->add_flag("--verbose", experiment_verbose, "progress lines on stderr");

  auto* estimate = app.add_subcommand("estimate", "hyperparameter fits along a run record");
  CloudFlags estimate_cloud;
  GraphFlags estimate_graph;
  KernelFlags estimate_kernel;
  std::string estimate_run;
  std::string estimate_out;
  double estimate_noise = 0.0;
  double estimate_grid_lo = 0.0;
  double estimate_grid_hi = 0.0;
  int estimate_grid_count = 25;
  add_cloud_flags(estimate, estimate_cloud);
  add_graph_flags(estimate, estimate_graph);
  add_kernel_flags(estimate, estimate_kernel);
  estimate->add_option("--run", estimate_run, "run record CSV")->required();
  estimate->add_option("--noise-sd", estimate_noise, "observation noise")->capture_default_str();
  estimate->add_option("--grid-lo", estimate_grid_lo, "grid lower bound (0 = family default)");
  estimate->add_option("--grid-hi", estimate_grid_hi, "grid upper bound");
  estimate->add_option("--grid-count", estimate_grid_count, "grid size")->capture_default_str();
  estimate->add_option("--out", estimate_out, "output path (stdout when omitted)");

  auto* benchmarks = app.add_subcommand("benchmarks", "benchmark objectives");
  auto* benchmarks_list = benchmarks->add_subcommand("list", "list objective names");
  benchmarks->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) return app.exit(e);
    std::cerr << e.what() << '\n' << app.help() << '\n';
    return 2;
  }

  try {
    if (*sample)
      return run_sample(sample_cloud, sample_graph, sample_kernel, sample_draw, sample_draw_seed,
                        sample_out);
    if (*spectrum_cmd)
      return run_spectrum(spectrum_cloud, spectrum_graph, spectrum_suggest, spectrum_out);
    if (*optimize)
      return run_optimize(optimize_config, optimize_overrides, optimize_method, optimize_out,
                          optimize_verbose);
    if (*experiment)
      return run_experiment_cmd(experiment_config, experiment_overrides, experiment_out,
                                experiment_jobs, experiment_verbose);
    if (*estimate)
      return run_estimate(estimate_run, estimate_cloud, estimate_graph, estimate_kernel,
                          estimate_noise, estimate_grid_lo, estimate_grid_hi, estimate_grid_count,
                          estimate_out);
    if (*benchmarks) {
      if (*benchmarks_list)
        for (const auto& name : gbo::benchmark_names()) std::cout << name << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
