#include "gbo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "gbo/errors.hpp"
#include "gbo/io.hpp"
#include "gbo/mle.hpp"
#include "gbo/posterior.hpp"
#include "gbo/rng.hpp"

namespace gbo {

double resolve_connectivity(const ConnectivityRule& rule, const PointCloud& cloud) {
  if (rule.absolute) {
    if (!(rule.value > 0.0)) throw std::invalid_argument("absolute connectivity radius must be positive");
    return rule.value;
  }
  return suggest_connectivity(cloud, rule.coeff, rule.mode);
}

namespace {

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double x = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "' expects a number, got '" + value + "'");
  }
}

int to_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const int x = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "' expects an integer, got '" + value + "'");
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const std::uint64_t x = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "' expects an unsigned integer, got '" +
                                value + "'");
  }
}

KernelFamily to_family(const std::string& key, const std::string& value) {
  if (value == "matern") return KernelFamily::matern;
  if (value == "se") return KernelFamily::se;
  throw std::invalid_argument("config key '" + key + "' expects matern or se, got '" + value + "'");
}

void parse_h_rule(ConnectivityRule& rule, const std::string& key, const std::string& value) {
  if (value == "experiment") {
    rule.absolute = false;
    rule.mode = HMode::experiment;
  } else if (value == "theory") {
    rule.absolute = false;
    rule.mode = HMode::theory;
  } else if (value == "absolute") {
    rule.absolute = true;
  } else {
    throw std::invalid_argument("config key '" + key +
                                "' expects experiment, theory, or absolute, got '" + value + "'");
  }
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(item);
  return parts;
}

std::string trimmed(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t");
  return text.substr(begin, end - begin + 1);
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::map<std::string, std::string>& entries) {
  ExperimentConfig config;
  for (const auto& [key, value] : entries) {
    if (key == "name") {
      config.name = value;
    } else if (key == "cloud") {
      if (value == "circle")
        config.cloud = CloudKind::circle;
      else if (value == "sphere")
        config.cloud = CloudKind::sphere;
      else if (value == "file")
        config.cloud = CloudKind::file;
      else
        throw std::invalid_argument("config key 'cloud' expects circle, sphere, or file, got '" +
                                    value + "'");
    } else if (key == "cloud_file") {
      config.cloud_file = value;
    } else if (key == "n") {
      config.n = to_int(key, value);
    } else if (key == "subsample_n") {
      config.subsample_n = to_int(key, value);
    } else if (key == "intrinsic_dim") {
      config.intrinsic_dim = to_int(key, value);
    } else if (key == "h_mode") {
      parse_h_rule(config.h, key, value);
    } else if (key == "h_coeff") {
      config.h.coeff = to_double(key, value);
    } else if (key == "h_value") {
      config.h.value = to_double(key, value);
    } else if (key == "k_n") {
      config.k_n = to_int(key, value);
    } else if (key == "family") {
      config.family = to_family(key, value);
    } else if (key == "prior_kappa2") {
      config.prior_kappa2 = to_double(key, value);
    } else if (key == "prior_s") {
      config.prior_s = to_double(key, value);
    } else if (key == "prior_tau") {
      config.prior_tau = to_double(key, value);
    } else if (key == "truth") {
      if (value == "mgp")
        config.truth = TruthKind::mgp;
      else if (value == "ggp")
        config.truth = TruthKind::ggp;
      else if (value == "ggp-fine")
        config.truth = TruthKind::ggp_fine;
      else if (value == "levy")
        config.truth = TruthKind::levy;
      else if (value == "ackley")
        config.truth = TruthKind::ackley;
      else if (value == "rastrigin")
        config.truth = TruthKind::rastrigin;
      else if (value == "heat")
        config.truth = TruthKind::heat;
      else
        throw std::invalid_argument("config key 'truth' got unknown kind '" + value + "'");
    } else if (key == "truth_family") {
      config.truth_family = to_family(key, value);
    } else if (key == "truth_kappa2") {
      config.truth_kappa2 = to_double(key, value);
    } else if (key == "truth_s") {
      config.truth_s = to_double(key, value);
    } else if (key == "truth_tau") {
      config.truth_tau = to_double(key, value);
    } else if (key == "truth_k") {
      config.truth_k = to_int(key, value);
    } else if (key == "fine_h_mode") {
      parse_h_rule(config.fine_h, key, value);
    } else if (key == "fine_h_coeff") {
      config.fine_h.coeff = to_double(key, value);
    } else if (key == "fine_h_value") {
      config.fine_h.value = to_double(key, value);
    } else if (key == "mgp_k") {
      config.mgp_k = to_int(key, value);
    } else if (key == "noise_mode") {
      if (value == "relative")
        config.noise_mode = NoiseMode::relative;
      else if (value == "absolute")
        config.noise_mode = NoiseMode::absolute;
      else
        throw std::invalid_argument("config key 'noise_mode' expects relative or absolute");
    } else if (key == "noise_level") {
      config.noise_level = to_double(key, value);
    } else if (key == "noise_sd") {
      config.noise_sd = to_double(key, value);
    } else if (key == "b_mode") {
      if (value == "empirical")
        config.b_mode = BMode::empirical;
      else if (value == "theoretical")
        config.b_mode = BMode::theoretical;
      else
        throw std::invalid_argument("config key 'b_mode' expects empirical or theoretical");
    } else if (key == "delta") {
      config.delta = to_double(key, value);
    } else if (key == "a") {
      config.a = to_double(key, value);
    } else if (key == "epsilon_n") {
      config.epsilon_n = to_double(key, value);
    } else if (key == "recommend") {
      if (value == "best_observed")
        config.recommend = Recommendation::best_observed;
      else if (value == "posterior_mean")
        config.recommend = Recommendation::posterior_mean;
      else
        throw std::invalid_argument(
            "config key 'recommend' expects best_observed or posterior_mean");
    } else if (key == "acq_subsample") {
      config.acq_subsample = to_int(key, value);
    } else if (key == "L") {
      config.iterations = to_int(key, value);
    } else if (key == "trials") {
      config.trials = to_int(key, value);
    } else if (key == "seed") {
      config.seed = to_u64(key, value);
    } else if (key == "methods") {
      config.methods.clear();
      for (const auto& part : split(value, ',')) {
        const std::string token = trimmed(part);
        if (!token.empty()) config.methods.push_back(token);
      }
    } else if (key == "ml_stride") {
      config.ml_stride = to_int(key, value);
    } else if (key == "ml_grid_lo") {
      config.ml_grid_lo = to_double(key, value);
    } else if (key == "ml_grid_hi") {
      config.ml_grid_hi = to_double(key, value);
    } else if (key == "ml_grid_count") {
      config.ml_grid_count = to_int(key, value);
    } else if (key == "zeta") {
      config.zeta = to_double(key, value);
    } else if (key == "t") {
      config.t = to_double(key, value);
    } else if (key == "heat_lmax") {
      config.heat_lmax = to_int(key, value);
    } else if (key == "heat_noise_sd") {
      config.heat_noise_sd = to_double(key, value);
    } else if (key == "z_star_index") {
      config.z_star_index = to_int(key, value);
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  validate(config);
  return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return parse_experiment_config(parse_config_file(path));
}

void validate(const ExperimentConfig& config) {
  if (config.trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (config.iterations < 1) throw std::invalid_argument("L must be at least 1");
  if (config.methods.empty()) throw std::invalid_argument("method list is empty");
  for (const auto& token : config.methods) parse_method(token);
  if (config.cloud == CloudKind::file) {
    if (config.cloud_file.empty()) throw std::invalid_argument("cloud = file needs cloud_file");
  } else if (config.n < 2) {
    throw std::invalid_argument("cloud size must be at least 2");
  }
  if (!(config.delta > 0.0 && config.delta < 1.0))
    throw std::invalid_argument("delta must lie in (0, 1)");
  if (config.k_n < 1) throw std::invalid_argument("k_n must be at least 1");
  if (config.truth_k < 1) throw std::invalid_argument("truth_k must be at least 1");
  if (config.noise_level < 0.0 || config.noise_sd < 0.0)
    throw std::invalid_argument("noise settings must be nonnegative");
  if (config.ml_stride < 1) throw std::invalid_argument("ml_stride must be at least 1");
  if (config.truth == TruthKind::ggp_fine &&
      (config.cloud != CloudKind::file || config.subsample_n < 2))
    throw std::invalid_argument("ggp-fine truth needs cloud = file with a subsample_n");
}

MethodSpec parse_method(const std::string& token) {
  MethodSpec spec;
  spec.token = token;
  if (token == "mgp") {
    spec.kind = MethodSpec::Kind::mgp;
    return spec;
  }
  if (token == "ggp") {
    spec.kind = MethodSpec::Kind::ggp;
    return spec;
  }
  if (token == "ggp-ml") {
    spec.kind = MethodSpec::Kind::ggp_ml;
    return spec;
  }
  if (token == "random") {
    spec.kind = MethodSpec::Kind::random;
    return spec;
  }
  const auto parts = split(token, ':');
  if (parts.size() == 3 && parts[0] == "egp") {
    spec.kind = MethodSpec::Kind::egp;
    spec.egp.family =
        parts[1] == "matern"
            ? EuclideanFamily::matern
            : (parts[1] == "se" ? EuclideanFamily::se
                                : throw std::invalid_argument("unknown kernel family in method '" +
                                                              token + "'"));
    for (const auto& assignment : split(parts[2], ';')) {
      const auto eq = assignment.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("method '" + token + "' has a malformed parameter");
      const std::string name = trimmed(assignment.substr(0, eq));
      const double value = to_double(name, trimmed(assignment.substr(eq + 1)));
      if (name == "nu")
        spec.egp.nu = value;
      else if (name == "kappa")
        spec.egp.kappa = value;
      else if (name == "tau")
        spec.egp.tau = value;
      else
        throw std::invalid_argument("method '" + token + "' has unknown parameter '" + name + "'");
    }
    validate(spec.egp);
    return spec;
  }
  throw std::invalid_argument("unknown method '" + token + "'");
}

std::string sanitize_filename(const std::string& token) {
  std::string out = token;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '.' || c == '_' || c == '=' || c == '-';
    if (!ok) c = '-';
  }
  return out;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty sample");
  if (p < 0.0 || p > 100.0) throw std::invalid_argument("percentile must lie in [0, 100]");
  std::sort(values.begin(), values.end());
  const double h = (values.size() - 1) * p / 100.0;
  const auto lo = static_cast<std::size_t>(h);
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

Eigen::VectorXd simple_regret(const Eigen::VectorXd& truth_values, const RunRecord& run) {
  const auto L = static_cast<Eigen::Index>(run.queries.size());
  const double best_possible = truth_values.maxCoeff();
  Eigen::VectorXd regret(L);
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index ell = 0; ell < L; ++ell) {
    best = std::max(best, truth_values[run.queries[static_cast<std::size_t>(ell)]]);
    regret[ell] = best_possible - best;
  }
  return regret;
}

Eigen::VectorXd recovery_error(const HeatProblem& problem, const RunRecord& run) {
  const auto L = static_cast<Eigen::Index>(run.queries.size());
  Eigen::VectorXd error(L);
  double best = -std::numeric_limits<double>::infinity();
  int incumbent = -1;
  for (Eigen::Index ell = 0; ell < L; ++ell) {
    if (run.observations[ell] > best) {
      best = run.observations[ell];
      incumbent = run.queries[static_cast<std::size_t>(ell)];
    }
    error[ell] =
        (problem.cloud.points.row(problem.z_star) - problem.cloud.points.row(incumbent)).norm();
  }
  return error;
}

namespace {

struct Workspace {
  PointCloud cloud;
  Eigen::VectorXd angles;  // 2-D clouds
  std::optional<GraphSpectrum> spec;
  std::optional<GraphSpectrum> fine_spec;
  PointCloud fine_cloud;
  std::vector<int> coarse_indices;
};

KernelSpec prior_spec(const ExperimentConfig& config) {
  KernelSpec spec;
  spec.family = config.family;
  spec.kappa = std::sqrt(config.prior_kappa2);
  spec.s = config.prior_s;
  spec.tau = config.prior_tau;
  spec.k_n = config.k_n;
  spec.m = config.intrinsic_dim;
  return spec;
}

KernelSpec truth_spec(const ExperimentConfig& config) {
  KernelSpec spec;
  spec.family = config.truth_family;
  spec.kappa = std::sqrt(config.truth_kappa2);
  spec.s = config.truth_s;
  spec.tau = config.truth_tau;
  spec.k_n = config.truth_k;
  spec.m = config.intrinsic_dim;
  return spec;
}

bool needs_graph(const ExperimentConfig& config) {
  if (config.truth == TruthKind::ggp || config.truth == TruthKind::heat) return true;
  for (const auto& token : config.methods) {
    const auto kind = parse_method(token).kind;
    if (kind == MethodSpec::Kind::ggp || kind == MethodSpec::Kind::ggp_ml) return true;
  }
  return false;
}

Workspace build_workspace(const ExperimentConfig& config) {
  Workspace ws;
  const std::uint64_t cloud_seed = derive_seed(config.seed, "cloud", 0);
  if (config.cloud == CloudKind::circle) {
    ws.cloud = sample_circle(config.n, cloud_seed);
  } else if (config.cloud == CloudKind::sphere) {
    ws.cloud = sample_sphere(config.n, cloud_seed);
  } else {
    ws.fine_cloud = load_point_cloud(config.cloud_file, config.intrinsic_dim);
    if (config.subsample_n > 0 && config.subsample_n < ws.fine_cloud.size()) {
      ws.coarse_indices =
          subsample_indices(ws.fine_cloud.size(), config.subsample_n, cloud_seed);
      ws.cloud.points.resize(config.subsample_n, ws.fine_cloud.ambient_dim());
      for (int i = 0; i < config.subsample_n; ++i)
        ws.cloud.points.row(i) = ws.fine_cloud.points.row(ws.coarse_indices[i]);
      ws.cloud.intrinsic_dim = config.intrinsic_dim;
    } else {
      ws.cloud = ws.fine_cloud;
    }
  }
  if (ws.cloud.ambient_dim() == 2) ws.angles = cloud_angles(ws.cloud);

  if (needs_graph(config)) {
    int k = config.k_n;
    if (config.truth == TruthKind::ggp) k = std::max(k, config.truth_k);
    const double h = resolve_connectivity(config.h, ws.cloud);
    const auto graph = build_weight_matrix(ws.cloud, h);
    ws.spec = spectrum(laplacian(graph), k);
  }
  if (config.truth == TruthKind::ggp_fine) {
    const double h = resolve_connectivity(config.fine_h, ws.fine_cloud);
    const auto graph = build_weight_matrix(ws.fine_cloud, h);
    ws.fine_spec = spectrum(laplacian(graph), config.truth_k);
  }
  return ws;
}

struct TruthData {
  Eigen::VectorXd values;
  double noise_sd = 0.0;
  std::shared_ptr<const HeatProblem> heat;
  std::string error;
};

TruthData make_truth(const ExperimentConfig& config, const Workspace& ws, int trial) {
  TruthData data;
  const std::uint64_t truth_seed = derive_seed(config.seed, "truth", trial);
  switch (config.truth) {
    case TruthKind::mgp: {
      const auto oracle = circle_oracle(ws.cloud, config.truth_k, truth_spec(config));
      data.values = sample_prior(oracle, truth_seed);
      break;
    }
    case TruthKind::ggp: {
      KernelSpec spec = truth_spec(config);
      const auto model = make_graph_model(*ws.spec, spec);
      data.values = sample_prior(model, truth_seed);
      break;
    }
    case TruthKind::ggp_fine: {
      KernelSpec spec = truth_spec(config);
      const auto model = make_graph_model(*ws.fine_spec, spec);
      const Eigen::VectorXd fine_values = sample_prior(model, truth_seed);
      data.values.resize(ws.cloud.size());
      for (int i = 0; i < ws.cloud.size(); ++i)
        data.values[i] = fine_values[ws.coarse_indices[static_cast<std::size_t>(i)]];
      break;
    }
    case TruthKind::levy:
    case TruthKind::ackley:
    case TruthKind::rastrigin: {
      const auto name = config.truth == TruthKind::levy
                            ? "levy"
                            : (config.truth == TruthKind::ackley ? "ackley" : "rastrigin");
      if (ws.angles.size() != ws.cloud.size())
        throw std::invalid_argument("benchmark truths need a 2-dimensional cloud");
      const auto fn = circle_benchmark(name);
      data.values.resize(ws.cloud.size());
      for (int i = 0; i < ws.cloud.size(); ++i) data.values[i] = -fn(ws.angles[i]);
      break;
    }
    case TruthKind::heat: {
      int source = config.z_star_index;
      if (source < 0)
        source = Rng(derive_seed(config.seed, "source", trial)).uniform_int(ws.cloud.size());
      auto problem = std::make_shared<HeatProblem>(
          make_heat_problem(ws.cloud, *ws.spec, config.zeta, source, config.t,
                            config.heat_noise_sd, config.heat_lmax, truth_seed));
      data.values = heat_objective_all(*problem);
      data.heat = std::move(problem);
      break;
    }
  }
  data.noise_sd = config.noise_mode == NoiseMode::relative
                      ? noise_from_truth(data.values, config.noise_level)
                      : config.noise_sd;
  return data;
}

void parallel_for(int count, int jobs, const std::function<void(int)>& body) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(jobs));
  for (int j = 0; j < jobs; ++j)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    });
  for (auto& worker : pool) worker.join();
}

Eigen::VectorXd ml_grid(const ExperimentConfig& config) {
  if (config.ml_grid_lo > 0.0 && config.ml_grid_hi > config.ml_grid_lo)
    return log_spaced_grid(config.ml_grid_lo, config.ml_grid_hi, config.ml_grid_count);
  return default_grid(config.family);
}

TrialResult run_trial(const ExperimentConfig& config, const Workspace& ws,
                      const MethodSpec& method, const TruthData& truth, int trial,
                      const ProgressFn& progress) {
  TrialResult result;
  const std::uint64_t run_seed = derive_seed(config.seed, method.token, trial);
  const Eigen::VectorXd& values = truth.values;
  const Objective objective = [&values](int i) { return values[i]; };

  UcbConfig ucb;
  ucb.mode = config.b_mode;
  ucb.delta = config.delta;
  ucb.a = config.a;
  ucb.epsilon_n = config.epsilon_n;
  ucb.acq_subsample = config.acq_subsample;
  ucb.recommend = config.recommend;

  switch (method.kind) {
    case MethodSpec::Kind::random:
      result.record = random_search_baseline(objective, ws.cloud.size(), config.iterations,
                                             run_seed, truth.noise_sd, progress);
      break;
    case MethodSpec::Kind::mgp: {
      KernelSpec spec = prior_spec(config);
      const int k = config.mgp_k > 0 ? config.mgp_k : config.truth_k;
      auto model = std::make_shared<SpectralCovariance>(circle_oracle(ws.cloud, k, spec));
      result.record = run_ucb(std::move(model), objective, truth.noise_sd, config.iterations, ucb,
                              run_seed, nullptr, progress);
      break;
    }
    case MethodSpec::Kind::ggp: {
      auto model = std::make_shared<SpectralCovariance>(make_graph_model(*ws.spec, prior_spec(config)));
      result.record = run_ucb(std::move(model), objective, truth.noise_sd, config.iterations, ucb,
                              run_seed, nullptr, progress);
      break;
    }
    case MethodSpec::Kind::ggp_ml: {
      const KernelSpec base = prior_spec(config);
      auto model = std::make_shared<SpectralCovariance>(make_graph_model(*ws.spec, base));
      const auto refit =
          make_refitter(*ws.spec, base, truth.noise_sd, ml_grid(config), config.ml_stride);
      result.record = run_ucb(std::move(model), objective, truth.noise_sd, config.iterations, ucb,
                              run_seed, refit, progress);
      break;
    }
    case MethodSpec::Kind::egp: {
      auto model = std::make_shared<EuclideanCovariance>(ws.cloud.points, method.egp);
      result.record = run_ucb(std::move(model), objective, truth.noise_sd, config.iterations, ucb,
                              run_seed, nullptr, progress);
      break;
    }
  }

  result.trace = config.truth == TruthKind::heat ? recovery_error(*truth.heat, result.record)
                                                 : simple_regret(values, result.record);
  return result;
}

}  // namespace

std::string method_csv(const MethodResult& result) {
  std::ostringstream out;
  out << "iteration,mean,p10,p90\n";
  for (Eigen::Index ell = 0; ell < result.mean.size(); ++ell)
    out << (ell + 1) << ',' << format_double(result.mean[ell]) << ','
        << format_double(result.p10[ell]) << ',' << format_double(result.p90[ell]) << '\n';
  return out.str();
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  validate(config);
  ExperimentResult result;
  result.config = config;

  const Workspace ws = build_workspace(config);
  const int expected = config.iterations + 1;
  if (expected > ws.cloud.size())
    throw std::invalid_argument("iteration budget exceeds the cloud size");

  std::vector<TruthData> truths(static_cast<std::size_t>(config.trials));
  parallel_for(config.trials, options.jobs, [&](int trial) {
    try {
      truths[static_cast<std::size_t>(trial)] = make_truth(config, ws, trial);
    } catch (const std::exception& e) {
      truths[static_cast<std::size_t>(trial)].error = e.what();
    }
  });

  std::mutex log_mutex;
  for (const auto& token : config.methods) {
    const MethodSpec method = parse_method(token);
    MethodResult summary;
    summary.method = token;
    summary.trials.resize(static_cast<std::size_t>(config.trials));

    const auto start = std::chrono::steady_clock::now();
    parallel_for(config.trials, options.jobs, [&](int trial) {
      auto& slot = summary.trials[static_cast<std::size_t>(trial)];
      const auto& truth = truths[static_cast<std::size_t>(trial)];
      if (!truth.error.empty()) {
        slot.error = truth.error;
        return;
      }
      ProgressFn progress;
      if (options.verbose)
        progress = [&, trial](int ell, double best) {
          std::lock_guard<std::mutex> lock(log_mutex);
          std::cerr << token << ' ' << trial << ' ' << ell << ' ' << best << '\n';
        };
      try {
        slot = run_trial(config, ws, method, truth, trial, progress);
      } catch (const std::exception& e) {
        slot.error = e.what();
      }
    });
    summary.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::vector<double> column;
    column.reserve(static_cast<std::size_t>(config.trials));
    summary.mean.resize(config.iterations);
    summary.p10.resize(config.iterations);
    summary.p90.resize(config.iterations);
    for (const auto& trial : summary.trials)
      if (trial.failed()) ++summary.failures;
    const int successes = config.trials - summary.failures;
    if (successes == 0) {
      summary.mean.resize(0);
      summary.p10.resize(0);
      summary.p90.resize(0);
    } else {
      for (int ell = 0; ell < config.iterations; ++ell) {
        column.clear();
        for (const auto& trial : summary.trials)
          if (!trial.failed()) column.push_back(trial.trace[ell]);
        double total = 0.0;
        for (double v : column) total += v;
        summary.mean[ell] = total / successes;
        summary.p10[ell] = percentile(column, 10.0);
        summary.p90[ell] = percentile(column, 90.0);
      }
    }
    result.methods.push_back(std::move(summary));
  }

  if (!options.out_dir.empty()) {
    for (const auto& method : result.methods)
      write_text_atomic(options.out_dir + "/" + sanitize_filename(method.method) + ".csv",
                        method_csv(method));

    nlohmann::json doc;
    doc["name"] = config.name;
    doc["n"] = ws.cloud.size();
    doc["iterations"] = config.iterations;
    doc["trials"] = config.trials;
    doc["seed"] = config.seed;
    for (const auto& method : result.methods) {
      nlohmann::json entry;
      entry["failures"] = method.failures;
      entry["seconds"] = method.seconds;
      if (method.mean.size() > 0) {
        entry["final_mean"] = method.mean[method.mean.size() - 1];
        entry["final_p10"] = method.p10[method.p10.size() - 1];
        entry["final_p90"] = method.p90[method.p90.size() - 1];
      }
      std::set<std::string> messages;
      for (const auto& trial : method.trials)
        if (trial.failed()) messages.insert(trial.error);
      if (!messages.empty()) entry["errors"] = messages;
      entry["complete"] = method.failures == 0;
      doc["methods"][method.method] = std::move(entry);
    }
    write_text_atomic(options.out_dir + "/summary.json", doc.dump(2) + "\n");
  }
  return result;
}

}  // namespace gbo
