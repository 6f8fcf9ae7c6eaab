#include "gbo/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gbo/rng.hpp"

namespace gbo {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kObjectiveCap = 1e12;
}  // namespace

double levy(double theta) {
  const double w = 0.75 * theta;
  const double s = std::sin(kPi * (3.0 * theta + 3.0) / 2.0);
  return w * w * (1.0 + s * s);
}

double ackley(double theta) {
  return -20.0 * std::exp(-0.1 * theta) - std::exp(std::cos(2.0 * kPi * theta)) + 20.0 +
         std::exp(1.0);
}

double rastrigin(double theta) {
  return 2.0 + theta * theta - 2.0 * std::cos(2.0 * kPi * theta);
}

std::vector<std::string> benchmark_names() { return {"levy", "ackley", "rastrigin"}; }

std::function<double(double)> circle_benchmark(const std::string& name) {
  if (name == "levy") return [](double theta) { return levy(theta); };
  if (name == "ackley") return [](double theta) { return ackley(theta); };
  if (name == "rastrigin") return [](double theta) { return rastrigin(theta); };
  throw std::invalid_argument("unknown benchmark function: " + name);
}

Eigen::VectorXd cloud_angles(const PointCloud& cloud) {
  if (cloud.ambient_dim() != 2)
    throw std::invalid_argument("angles need a 2-dimensional ambient space");
  Eigen::VectorXd angles(cloud.size());
  for (int i = 0; i < cloud.size(); ++i)
    angles[i] = std::atan2(cloud.points(i, 1), cloud.points(i, 0));
  return angles;
}

void validate(const EuclideanKernel& kernel) {
  if (kernel.family == EuclideanFamily::matern) {
    if (!(kernel.nu > 0.0)) throw std::invalid_argument("matern smoothness must be positive");
    if (!(kernel.kappa > 0.0)) throw std::invalid_argument("matern scale must be positive");
  } else if (!(kernel.tau > 0.0)) {
    throw std::invalid_argument("se length-scale must be positive");
  }
}

double euclidean_covariance(const EuclideanKernel& kernel, double r) {
  if (r < 0.0) throw std::invalid_argument("distance must be nonnegative");
  if (kernel.family == EuclideanFamily::se) return std::exp(-r * r / (4.0 * kernel.tau));
  if (r == 0.0) return 1.0;
  const double x = kernel.kappa * r;
  const double nu = kernel.nu;
  // half-integer orders have elementary closed forms; anything else goes
  // through the Bessel function
  if (nu == 0.5) return std::exp(-x);
  if (nu == 1.5) return (1.0 + x) * std::exp(-x);
  if (nu == 2.5) return (1.0 + x + x * x / 3.0) * std::exp(-x);
  return std::pow(2.0, 1.0 - nu) / std::tgamma(nu) * std::pow(x, nu) * std::cyl_bessel_k(nu, x);
}

EuclideanCovariance::EuclideanCovariance(Eigen::MatrixXd points, EuclideanKernel kernel)
    : points_(std::move(points)), kernel_(kernel) {
  if (points_.rows() < 1) throw std::invalid_argument("empty point set");
  validate(kernel_);
}

double EuclideanCovariance::covariance(int i, int j) const {
  check_index(i);
  check_index(j);
  const double r = (points_.row(i) - points_.row(j)).norm();
  return euclidean_covariance(kernel_, r);
}

Eigen::VectorXd EuclideanCovariance::variance_diagonal() const {
  return Eigen::VectorXd::Ones(points_.rows());
}

namespace {

Eigen::VectorXd vmf_bump(const Eigen::MatrixXd& points, const Eigen::RowVector3d& center,
                         double zeta) {
  return (zeta * (points * center.transpose())).array().exp();
}

}  // namespace

HeatProblem make_heat_problem(const PointCloud& cloud, const GraphSpectrum& spectrum,
                              double zeta, int z_star, double t, double noise_sd, int l_max,
                              std::uint64_t seed) {
  validate(cloud);
  if (cloud.ambient_dim() != 3)
    throw std::invalid_argument("heat problem lives on the unit sphere in R^3");
  if (spectrum.n() != cloud.size())
    throw std::invalid_argument("spectrum size does not match the cloud");
  if (!(zeta > 0.0)) throw std::invalid_argument("concentration must be positive");
  if (t < 0.0) throw std::invalid_argument("observation time must be nonnegative");
  if (noise_sd < 0.0) throw std::invalid_argument("noise level must be nonnegative");
  if (z_star < 0 || z_star >= cloud.size()) throw std::invalid_argument("source index out of range");
  if (l_max < 0) throw std::invalid_argument("degree cutoff must be nonnegative");
  for (int i = 0; i < cloud.size(); ++i)
    if (std::abs(cloud.points.row(i).norm() - 1.0) > 1e-8)
      throw std::invalid_argument("heat problem needs unit-norm points");

  HeatProblem problem;
  problem.cloud = cloud;
  problem.zeta = zeta;
  problem.z_star = z_star;
  problem.t = t;
  problem.data_noise_sd = noise_sd;

  // measurements from the analytic expansion: coefficients of the source bump
  // in probability-normalized harmonics via the cloud's Monte Carlo quadrature
  const Eigen::MatrixXd harmonics = sphere_harmonics(cloud.points, l_max);
  const Eigen::VectorXd lambdas = sphere_eigenvalues(l_max);
  const Eigen::VectorXd phi0 =
      vmf_bump(cloud.points, cloud.points.row(z_star), zeta);
  const Eigen::VectorXd coeff = harmonics.transpose() * phi0 / cloud.size();
  const Eigen::VectorXd damped = coeff.array() * (-lambdas.array() * t).exp();
  problem.data = harmonics * damped;
  if (noise_sd > 0.0) {
    Rng rng(seed);
    for (Eigen::Index i = 0; i < problem.data.size(); ++i)
      problem.data[i] += noise_sd * rng.normal();
  }

  problem.basis = spectrum.eigenvectors;
  problem.eigenvalues = spectrum.eigenvalues;
  problem.decay.resize(spectrum.k());
  for (int i = 0; i < spectrum.k(); ++i) {
    const double norm2 = problem.basis.col(i).squaredNorm();
    problem.decay[i] = std::exp(-problem.eigenvalues[i] * t) / norm2;
  }
  return problem;
}

namespace {

double residual_to_objective(double residual) {
  if (!(residual > 0.0)) return kObjectiveCap;
  return std::min(-std::log(residual), kObjectiveCap);
}

}  // namespace

double heat_objective(const HeatProblem& problem, int z) {
  if (z < 0 || z >= problem.cloud.size()) throw std::invalid_argument("point index out of range");
  const Eigen::VectorXd phi =
      vmf_bump(problem.cloud.points, problem.cloud.points.row(z), problem.zeta);
  const Eigen::VectorXd w = problem.basis.transpose() * phi;
  const Eigen::VectorXd g = problem.basis * (problem.decay.asDiagonal() * w);
  return residual_to_objective((problem.data - g).lpNorm<Eigen::Infinity>());
}

Eigen::VectorXd heat_objective_all(const HeatProblem& problem) {
  const int n = problem.cloud.size();
  Eigen::VectorXd values(n);
  constexpr int kBlock = 256;
  for (int start = 0; start < n; start += kBlock) {
    const int cols = std::min(kBlock, n - start);
    const Eigen::MatrixXd bumps =
        (problem.zeta *
         (problem.cloud.points * problem.cloud.points.middleRows(start, cols).transpose()))
            .array()
            .exp();
    const Eigen::MatrixXd w = problem.basis.transpose() * bumps;
    const Eigen::MatrixXd g = problem.basis * (problem.decay.asDiagonal() * w);
    for (int c = 0; c < cols; ++c)
      values[start + c] =
          residual_to_objective((problem.data - g.col(c)).lpNorm<Eigen::Infinity>());
  }
  return values;
}

double noise_from_truth(const Eigen::VectorXd& truth, double level) {
  if (truth.size() < 1) throw std::invalid_argument("empty truth vector");
  if (level < 0.0) throw std::invalid_argument("noise level must be nonnegative");
  return level * truth.norm() / std::sqrt(static_cast<double>(truth.size()));
}

}  // namespace gbo
