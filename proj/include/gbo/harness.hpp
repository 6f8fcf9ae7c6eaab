#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gbo/acquisition.hpp"
#include "gbo/benchmarks.hpp"
#include "gbo/covariance.hpp"
#include "gbo/graph.hpp"
#include "gbo/point_cloud.hpp"

namespace gbo {

enum class CloudKind { circle, sphere, file };
enum class TruthKind { mgp, ggp, ggp_fine, levy, ackley, rastrigin, heat };
enum class NoiseMode { relative, absolute };

// Connectivity radius rule: a coefficient rule through suggest_connectivity
// or a fixed value for clouds whose scale is known in advance.
struct ConnectivityRule {
  bool absolute = false;
  HMode mode = HMode::experiment;
  double coeff = 4.0;
  double value = 0.0;
};

double resolve_connectivity(const ConnectivityRule& rule, const PointCloud& cloud);

struct ExperimentConfig {
  std::string name = "experiment";

  CloudKind cloud = CloudKind::circle;
  std::string cloud_file;
  int n = 500;
  int subsample_n = 0;  // file clouds: optional seeded subsample size
  int intrinsic_dim = 1;

  ConnectivityRule h;
  int k_n = 20;

  KernelFamily family = KernelFamily::matern;  // surrogate prior family
  double prior_kappa2 = 15.0;
  double prior_s = 2.0;
  double prior_tau = 0.1;

  TruthKind truth = TruthKind::mgp;
  KernelFamily truth_family = KernelFamily::matern;
  double truth_kappa2 = 15.0;
  double truth_s = 2.0;
  double truth_tau = 0.1;
  int truth_k = 100;        // series truncation for sampled truths
  ConnectivityRule fine_h;  // ggp_fine: graph rule on the full file cloud
  int mgp_k = 0;            // analytic prior truncation; 0 copies truth_k

  NoiseMode noise_mode = NoiseMode::relative;
  double noise_level = 0.05;
  double noise_sd = 0.0;

  BMode b_mode = BMode::empirical;
  double delta = 0.1;
  double a = 0.5;
  double epsilon_n = 0.0;
  Recommendation recommend = Recommendation::best_observed;
  int acq_subsample = 0;

  int iterations = 50;  // L
  int trials = 50;
  std::uint64_t seed = 1;
  std::vector<std::string> methods;

  int ml_stride = 1;
  double ml_grid_lo = 0.0;  // 0 picks the family default grid
  double ml_grid_hi = 0.0;
  int ml_grid_count = 25;

  double zeta = 2.0;
  double t = 0.25;
  int heat_lmax = 5;
  double heat_noise_sd = 0.1;
  int z_star_index = -1;  // -1 draws a fresh source per trial
};

ExperimentConfig parse_experiment_config(const std::map<std::string, std::string>& entries);
ExperimentConfig load_experiment_config(const std::string& path);
void validate(const ExperimentConfig& config);

struct MethodSpec {
  enum class Kind { mgp, ggp, ggp_ml, egp, random };
  Kind kind = Kind::ggp;
  std::string token;  // verbatim method name, the seed and file identity
  EuclideanKernel egp;
};

// Tokens: "mgp", "ggp", "ggp-ml", "random", and "egp:<family>:<p>=<v>[;...]"
// with parameters nu, kappa (matern) or tau (se).
MethodSpec parse_method(const std::string& token);
std::string sanitize_filename(const std::string& token);

// Linear-interpolation percentile, p in [0, 100].
double percentile(std::vector<double> values, double p);

// r_l = max f - best true value among the first l queries.
Eigen::VectorXd simple_regret(const Eigen::VectorXd& truth_values, const RunRecord& run);

// Distance from the true source to the incumbent (best-observed) query.
Eigen::VectorXd recovery_error(const HeatProblem& problem, const RunRecord& run);

struct TrialResult {
  Eigen::VectorXd trace;
  RunRecord record;
  std::string error;  // nonempty when the trial failed

  bool failed() const { return !error.empty(); }
};

struct MethodResult {
  std::string method;
  std::vector<TrialResult> trials;
  Eigen::VectorXd mean, p10, p90;  // over successful trials, per iteration
  int failures = 0;
  double seconds = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<MethodResult> methods;
};

struct RunOptions {
  std::string out_dir;  // empty skips file output
  int jobs = 1;
  bool verbose = false;
};

// Runs every (method, trial) pair with seeds derived from the master seed and
// the method token, aggregates traces, and writes <out>/<method>.csv plus
// summary.json. Per-trial failures are recorded and skipped in aggregates.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

std::string method_csv(const MethodResult& result);

}  // namespace gbo
