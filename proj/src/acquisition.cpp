#include "gbo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "gbo/errors.hpp"
#include "gbo/io.hpp"
#include "gbo/rng.hpp"

namespace gbo {

void validate(const UcbConfig& config) {
  if (!(config.delta > 0.0 && config.delta < 1.0))
    throw std::invalid_argument("delta must lie in (0, 1)");
  if (!(config.a > 0.0)) throw std::invalid_argument("a must be positive");
  if (config.epsilon_n < 0.0) throw std::invalid_argument("epsilon_n must be nonnegative");
  if (config.acq_subsample < 0)
    throw std::invalid_argument("acq_subsample must be nonnegative");
}

double beta(const UcbConfig& config, int ell, int n, double noise_sd) {
  validate(config);
  if (ell < 1) throw std::invalid_argument("iteration index must be at least 1");
  if (n < 1) throw std::invalid_argument("cloud size must be positive");
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double base =
      std::sqrt(2.0 * std::log(pi2 * static_cast<double>(ell) * ell * n / (6.0 * config.delta)));
  if (config.mode == BMode::empirical) return config.a * base;
  double correction = 0.0;
  if (config.epsilon_n > 0.0) {
    if (noise_sd <= 0.0)
      throw std::invalid_argument(
          "misspecification correction requires positive observation noise");
    correction = config.epsilon_n * std::sqrt(static_cast<double>(ell - 1)) /
                 (config.delta * noise_sd);
  }
  return base + correction;
}

int argmax_ucb(const Eigen::VectorXd& mu, const Eigen::VectorXd& sd, double b,
               const std::vector<char>& excluded) {
  const auto n = mu.size();
  if (sd.size() != n || static_cast<Eigen::Index>(excluded.size()) != n)
    throw std::invalid_argument("mean, deviation, and exclusion sizes disagree");
  int best = -1;
  double best_value = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (excluded[i]) continue;
    const double value = mu[i] + b * sd[i];
    if (best < 0 || value > best_value) {
      best = static_cast<int>(i);
      best_value = value;
    }
  }
  if (best < 0) throw ExhaustionError("all candidate points are excluded");
  return best;
}

int select_next(const PosteriorState& state, double b, const std::vector<char>& excluded) {
  const Eigen::VectorXd mu = posterior_mean_all(state);
  const Eigen::VectorXd sd = posterior_std_all(state);
  return argmax_ucb(mu, sd, b, excluded);
}

namespace {

int recommend_index(const RunRecord& record, const PosteriorState& state,
                    Recommendation mode) {
  if (mode == Recommendation::posterior_mean) {
    const Eigen::VectorXd mu = posterior_mean_all(state);
    Eigen::Index arg = 0;
    mu.maxCoeff(&arg);
    return static_cast<int>(arg);
  }
  int best = record.init_index;
  double best_value = record.init_observation;
  for (std::size_t i = 0; i < record.queries.size(); ++i) {
    if (record.observations[static_cast<Eigen::Index>(i)] > best_value) {
      best = record.queries[i];
      best_value = record.observations[static_cast<Eigen::Index>(i)];
    }
  }
  return best;
}

}  // namespace

RunRecord run_ucb(std::shared_ptr<const CovarianceModel> model, const Objective& objective,
                  double noise_sd, int L, const UcbConfig& config, std::uint64_t seed,
                  const ModelRefitter& refit, const ProgressFn& progress) {
  if (!model) throw std::invalid_argument("covariance model is required");
  validate(config);
  if (L < 1) throw std::invalid_argument("iteration budget must be at least 1");
  if (noise_sd < 0.0) throw std::invalid_argument("noise level must be nonnegative");
  const int n = model->size();
  if (config.exclude_visited && L + 1 > n)
    throw ExhaustionError("iteration budget exceeds the number of distinct points");

  Rng rng(seed);
  RunRecord record;
  record.queries.reserve(static_cast<std::size_t>(L));
  record.observations.resize(L);
  record.b_values.resize(L);
  record.acq_values.resize(L);

  auto observe = [&](int index) {
    double y = objective(index);
    if (noise_sd > 0.0) y += noise_sd * rng.normal();
    return y;
  };

  record.init_index = rng.uniform_int(n);
  record.init_observation = observe(record.init_index);

  std::vector<char> excluded(static_cast<std::size_t>(n), 0);
  std::vector<char> scanned;  // restricted candidate set, if any
  if (config.acq_subsample > 0 && config.acq_subsample < n) {
    scanned.assign(static_cast<std::size_t>(n), 1);
    for (int i : rng.sample_without_replacement(n, config.acq_subsample))
      scanned[static_cast<std::size_t>(i)] = 0;
  }
  if (config.exclude_visited) excluded[static_cast<std::size_t>(record.init_index)] = 1;

  std::vector<int> visited{record.init_index};
  Eigen::VectorXd values(1);
  values[0] = record.init_observation;

  PosteriorState state;
  for (int ell = 1; ell <= L; ++ell) {
    if (refit) model = refit(visited, values, ell);
    state = condition(model, visited, values, noise_sd);
    const double b = beta(config, ell, n, noise_sd);
    record.b_values[ell - 1] = b;

    const Eigen::VectorXd mu = posterior_mean_all(state);
    const Eigen::VectorXd sd = posterior_std_all(state);
    int next = -1;
    if (scanned.empty()) {
      next = argmax_ucb(mu, sd, b, excluded);
    } else {
      std::vector<char> mask(scanned);
      for (Eigen::Index i = 0; i < n; ++i)
        if (excluded[static_cast<std::size_t>(i)]) mask[static_cast<std::size_t>(i)] = 1;
      next = argmax_ucb(mu, sd, b, mask);
    }
    record.acq_values[ell - 1] = mu[next] + b * sd[next];
    record.queries.push_back(next);
    record.observations[ell - 1] = observe(next);

    if (config.exclude_visited) excluded[static_cast<std::size_t>(next)] = 1;
    visited.push_back(next);
    values.conservativeResize(values.size() + 1);
    values[values.size() - 1] = record.observations[ell - 1];
    if (progress) progress(ell, values.maxCoeff());
  }

  state = condition(model, visited, values, noise_sd);
  record.recommendation = recommend_index(record, state, config.recommend);
  return record;
}

RunRecord random_search_baseline(const Objective& objective, int n, int L, std::uint64_t seed,
                                 double noise_sd, const ProgressFn& progress) {
  if (n < 1) throw std::invalid_argument("cloud size must be positive");
  if (L < 1) throw std::invalid_argument("iteration budget must be at least 1");
  if (L + 1 > n) throw ExhaustionError("iteration budget exceeds the number of distinct points");
  if (noise_sd < 0.0) throw std::invalid_argument("noise level must be nonnegative");

  Rng rng(seed);
  RunRecord record;
  record.observations.resize(L);
  record.b_values = Eigen::VectorXd::Zero(L);
  record.acq_values = Eigen::VectorXd::Zero(L);

  auto observe = [&](int index) {
    double y = objective(index);
    if (noise_sd > 0.0) y += noise_sd * rng.normal();
    return y;
  };

  std::vector<int> picks = rng.sample_without_replacement(n, L + 1);
  record.init_index = picks[0];
  record.init_observation = observe(picks[0]);
  record.queries.assign(picks.begin() + 1, picks.end());

  int best = record.init_index;
  double best_value = record.init_observation;
  for (int ell = 0; ell < L; ++ell) {
    record.observations[ell] = observe(record.queries[static_cast<std::size_t>(ell)]);
    if (record.observations[ell] > best_value) {
      best = record.queries[static_cast<std::size_t>(ell)];
      best_value = record.observations[ell];
    }
    if (progress) progress(ell + 1, best_value);
  }
  record.recommendation = best;
  return record;
}

std::string run_record_csv(const RunRecord& record) {
  std::ostringstream out;
  out << "iteration,query_index,observation,B,best_so_far\n";
  double best = record.init_observation;
  for (std::size_t i = 0; i < record.queries.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    best = std::max(best, record.observations[idx]);
    out << (i + 1) << ',' << record.queries[i] << ',' << format_double(record.observations[idx])
        << ',' << format_double(record.b_values[idx]) << ',' << format_double(best) << '\n';
  }
  return out.str();
}

void write_run_record_csv(const RunRecord& record, const std::string& path) {
  write_text_atomic(path, run_record_csv(record));
}

}  // namespace gbo
