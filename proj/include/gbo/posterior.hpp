#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "gbo/covariance.hpp"

namespace gbo {

// Exact GP conditioning on noisy observations at query indices. Rebuilt from
// scratch every iteration; immutable afterwards.
struct PosteriorState {
  std::shared_ptr<const CovarianceModel> model;
  std::vector<int> queries;
  Eigen::VectorXd observations;
  double noise_sd = 0.0;
  double jitter = 0.0;                   // diagonal boost actually applied
  Eigen::LLT<Eigen::MatrixXd> factorization;  // of C + (sigma^2 + jitter) I
  Eigen::VectorXd alpha;                 // (C + sigma^2 I)^{-1} Y
};

PosteriorState condition(std::shared_ptr<const CovarianceModel> model, std::vector<int> queries,
                         Eigen::VectorXd observations, double noise_sd);

double posterior_mean(const PosteriorState& state, int z);
double posterior_std(const PosteriorState& state, int z);

// Batch evaluation over the whole cloud; the workhorse of the acquisition scan.
Eigen::VectorXd posterior_mean_all(const PosteriorState& state);
Eigen::VectorXd posterior_std_all(const PosteriorState& state);

// Shared jitter policy: factorize A + (sigma^2 + jitter) I, escalating jitter
// from 1e-10 to 1e-6 of the mean diagonal when the factorization fails.
// Returns the jitter used.
double factorize_with_jitter(const Eigen::MatrixXd& gram, double noise_sd,
                             Eigen::LLT<Eigen::MatrixXd>& llt);

}  // namespace gbo
