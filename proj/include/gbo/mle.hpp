#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gbo/acquisition.hpp"
#include "gbo/covariance.hpp"
#include "gbo/graph.hpp"

namespace gbo {

// `count` values spaced evenly in log scale over [lo, hi], ascending.
Eigen::VectorXd log_spaced_grid(double lo, double hi, int count);

// Exact Gaussian marginal likelihood: with Sigma the prior covariance at the
// queries plus sigma^2 I,
//   nll = (Y' Sigma^{-1} Y + log det Sigma + l log 2 pi) / 2.
double negative_log_likelihood(const CovarianceModel& model, const std::vector<int>& queries,
                               const Eigen::VectorXd& observations, double noise_sd);

// The single free hyperparameter: smoothness s for Matern (kappa stays
// fixed), length-scale tau for SE.
KernelSpec with_free_parameter(KernelSpec base, double value);
double free_parameter(const KernelSpec& spec);

// Matern searches s over [1, 10], SE searches tau over [0.01, 1]; 25 points.
Eigen::VectorXd default_grid(KernelFamily family);

struct MleResult {
  KernelSpec spec;            // base with the winning parameter filled in
  double parameter = 0.0;
  double nll = 0.0;
  Eigen::VectorXd grid;
  Eigen::VectorXd nll_values; // aligned with grid
};

// Grid search over the free parameter; ties resolve to the smallest value.
MleResult estimate(const GraphSpectrum& spectrum, const KernelSpec& base,
                   const std::vector<int>& queries, const Eigen::VectorXd& observations,
                   double noise_sd, const Eigen::VectorXd& grid);

// Refitter plugging the grid search into the optimization loop. Re-estimates
// on iterations 1, 1+stride, 1+2*stride, ... and reuses the previous model in
// between.
ModelRefitter make_refitter(const GraphSpectrum& spectrum, KernelSpec base, double noise_sd,
                            Eigen::VectorXd grid, int stride = 1);

}  // namespace gbo
