#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gbo/covariance.hpp"
#include "gbo/graph.hpp"
#include "gbo/point_cloud.hpp"

namespace gbo {

// Circle test functions over theta in [-pi, pi). All vanish at theta = 0 and
// carry many sharp local minima; negate them for the maximization loop.
double levy(double theta);
double ackley(double theta);
double rastrigin(double theta);

std::vector<std::string> benchmark_names();
std::function<double(double)> circle_benchmark(const std::string& name);

// Angle of each 2-D cloud point via atan2.
Eigen::VectorXd cloud_angles(const PointCloud& cloud);

// Stationary kernels on ambient Euclidean distance, the baseline surrogate
// that ignores the manifold. Matern: 2^{1-nu}/Gamma(nu) (kappa r)^nu
// K_nu(kappa r) with value 1 at r = 0; SE: exp(-r^2 / 4 tau).
enum class EuclideanFamily { matern, se };

struct EuclideanKernel {
  EuclideanFamily family = EuclideanFamily::matern;
  double nu = 0.5;     // matern smoothness
  double kappa = 1.0;  // matern inverse length-scale
  double tau = 0.1;    // se length-scale
};

void validate(const EuclideanKernel& kernel);
double euclidean_covariance(const EuclideanKernel& kernel, double r);

class EuclideanCovariance final : public CovarianceModel {
 public:
  EuclideanCovariance(Eigen::MatrixXd points, EuclideanKernel kernel);

  int size() const override { return static_cast<int>(points_.rows()); }
  double covariance(int i, int j) const override;
  Eigen::VectorXd variance_diagonal() const override;

  const EuclideanKernel& kernel() const { return kernel_; }

 private:
  Eigen::MatrixXd points_;
  EuclideanKernel kernel_;
};

// Source detection for the heat equation on the unit sphere. Measurements d
// are the analytic heat solution at time t, truncated to l <= l_max, started
// from the von Mises-Fisher bump exp(zeta z*.x), plus N(0, noise_sd^2) noise.
// The objective expands the candidate bump in graph eigenvectors instead:
//   f(z) = -log || d - G(z) ||_inf,
// with G(z) the graph spectral heat propagation of exp(zeta z.x).
struct HeatProblem {
  PointCloud cloud;
  Eigen::MatrixXd basis;         // graph eigenvectors, N x k
  Eigen::VectorXd eigenvalues;   // graph eigenvalues, k
  Eigen::VectorXd decay;         // e^{-lambda_i t} / ||basis_i||^2
  Eigen::VectorXd data;          // d
  double zeta = 2.0;
  int z_star = 0;
  double t = 0.25;
  double data_noise_sd = 0.1;
};

HeatProblem make_heat_problem(const PointCloud& cloud, const GraphSpectrum& spectrum,
                              double zeta, int z_star, double t, double noise_sd, int l_max,
                              std::uint64_t seed);

// Objective value at one index; a zero residual caps at 1e12 to keep the
// argmax finite.
double heat_objective(const HeatProblem& problem, int z);

// Exhaustive tabulation over the cloud, blocked for cache-friendly GEMMs.
// Evaluation-side oracle only; the optimizer never sees it.
Eigen::VectorXd heat_objective_all(const HeatProblem& problem);

// Observation noise from the truth values: level * ||f||_2 / sqrt(N).
double noise_from_truth(const Eigen::VectorXd& truth, double level = 0.05);

}  // namespace gbo
