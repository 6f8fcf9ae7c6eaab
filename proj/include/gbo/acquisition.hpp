#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gbo/posterior.hpp"

namespace gbo {

enum class BMode { theoretical, empirical };
enum class Recommendation { best_observed, posterior_mean };

struct UcbConfig {
  BMode mode = BMode::empirical;
  double delta = 0.1;        // confidence level
  double a = 0.5;            // empirical weight
  double epsilon_n = 0.0;    // misspecification budget (theoretical mode)
  bool exclude_visited = true;
  int acq_subsample = 0;     // 0 scans the full cloud, otherwise a seeded subset size
  Recommendation recommend = Recommendation::best_observed;
};

void validate(const UcbConfig& config);

// Exploration weight B_{N,l}. Theoretical mode adds the misspecification
// correction eps_N sqrt(l-1) / (delta sigma); empirical mode scales the
// baseline by `a`.
double beta(const UcbConfig& config, int ell, int n, double noise_sd);

// Argmax of mu + B sd over indices not marked in `excluded`; ties go to the
// lowest index. Throws ExhaustionError when everything is excluded.
int argmax_ucb(const Eigen::VectorXd& mu, const Eigen::VectorXd& sd, double b,
               const std::vector<char>& excluded);

int select_next(const PosteriorState& state, double b, const std::vector<char>& excluded);

// One optimization run. Queries exclude the seeded initialization point;
// observations carry i.i.d. N(0, sigma^2) noise.
struct RunRecord {
  int init_index = -1;
  double init_observation = 0.0;
  std::vector<int> queries;        // z_1 .. z_L
  Eigen::VectorXd observations;    // y_1 .. y_L
  Eigen::VectorXd b_values;        // B_{N,1} .. B_{N,L}
  Eigen::VectorXd acq_values;      // acquisition value at each chosen point
  int recommendation = -1;         // cloud index
};

using Objective = std::function<double(int)>;

// Optional per-iteration model rebuild (hyperparameter re-estimation). Called
// with all observed (queries, values) before conditioning; iteration is the
// 1-based acquisition round.
using ModelRefitter = std::function<std::shared_ptr<const CovarianceModel>(
    const std::vector<int>&, const Eigen::VectorXd&, int)>;

// Progress callback: (iteration, best observation so far).
using ProgressFn = std::function<void(int, double)>;

RunRecord run_ucb(std::shared_ptr<const CovarianceModel> model, const Objective& objective,
                  double noise_sd, int L, const UcbConfig& config, std::uint64_t seed,
                  const ModelRefitter& refit = nullptr, const ProgressFn& progress = nullptr);

// L distinct uniform queries without replacement, same record shape.
RunRecord random_search_baseline(const Objective& objective, int n, int L, std::uint64_t seed,
                                 double noise_sd = 0.0, const ProgressFn& progress = nullptr);

// CSV with columns iteration, query_index, observation, B, best_so_far.
std::string run_record_csv(const RunRecord& record);
void write_run_record_csv(const RunRecord& record, const std::string& path);

}  // namespace gbo
