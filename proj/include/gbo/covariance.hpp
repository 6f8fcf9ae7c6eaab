#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "gbo/graph.hpp"
#include "gbo/point_cloud.hpp"
#include "gbo/rng.hpp"

namespace gbo {

enum class KernelFamily { matern, se };

// Spectral filter parameters. Matern uses {kappa, s}, SE uses {tau}; k_n is
// the truncation and m the intrinsic dimension entering the amplitude
// exponents. `amplitude` is an optional extra variance multiplier (1 keeps
// the exact series amplitude).
struct KernelSpec {
  KernelFamily family = KernelFamily::matern;
  double kappa = 1.0;
  double s = 2.0;
  double tau = 0.1;
  int k_n = 1;
  int m = 1;
  double amplitude = 1.0;
};

void validate(const KernelSpec& spec);

// Per-mode prior variances: Matern kappa^{2s-m} (kappa^2 + lambda)^{-s},
// SE tau^{m/2} e^{-lambda tau}. Strictly decreasing in lambda.
Eigen::VectorXd spectral_coefficients(const KernelSpec& spec, const Eigen::VectorXd& eigenvalues);

// Common surface for prior covariances over a fixed point cloud, indexed by
// cloud position. Implemented by the spectral (graph or analytic) models here
// and by the Euclidean-kernel baseline in benchmarks.
class CovarianceModel {
 public:
  virtual ~CovarianceModel() = default;
  virtual int size() const = 0;
  virtual double covariance(int i, int j) const = 0;
  virtual Eigen::VectorXd variance_diagonal() const = 0;
  // N x l matrix of covariances between every cloud point and the queries
  virtual Eigen::MatrixXd cross_covariance(const std::vector<int>& queries) const;
  // l x l Gram matrix over an index list
  virtual Eigen::MatrixXd covariance_matrix(const std::vector<int>& indices) const;

 protected:
  void check_index(int i) const;
};

// Rank-k model c(x_i, x_j) = sum_r w_r psi_r(i) psi_r(j) given a basis of
// eigenvector values and per-mode weights.
class SpectralCovariance : public CovarianceModel {
 public:
  SpectralCovariance(Eigen::MatrixXd basis, Eigen::VectorXd eigenvalues, KernelSpec spec);

  int size() const override { return static_cast<int>(basis_.rows()); }
  double covariance(int i, int j) const override;
  Eigen::VectorXd variance_diagonal() const override;
  Eigen::MatrixXd cross_covariance(const std::vector<int>& queries) const override;
  Eigen::MatrixXd covariance_matrix(const std::vector<int>& indices) const override;

  const Eigen::MatrixXd& basis() const { return basis_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const KernelSpec& spec() const { return spec_; }

  // One draw sum_r sqrt(w_r) xi_r psi_r with xi_r i.i.d. standard normal.
  Eigen::VectorXd sample(Rng& rng) const;

 private:
  Eigen::MatrixXd basis_;        // N x k
  Eigen::VectorXd eigenvalues_;  // k
  Eigen::VectorXd weights_;      // k
  KernelSpec spec_;
};

// Graph GP prior: spectral filter of the first k_n graph Laplacian eigenpairs.
SpectralCovariance make_graph_model(const GraphSpectrum& spectrum, const KernelSpec& spec);

Eigen::VectorXd sample_prior(const SpectralCovariance& model, std::uint64_t seed);

// Analytic circle model: eigenvalues {0, 1, 1, 4, 4, 9, 9, ...} with
// eigenfunctions {1, sqrt(2) cos(k theta), sqrt(2) sin(k theta)}, normalized
// in L^2 of the uniform probability measure. K terms of the series.
SpectralCovariance circle_oracle(const PointCloud& cloud, int K, const KernelSpec& spec);

// Sphere eigenvalues l(l+1), each with multiplicity 2l+1, for l <= l_max.
Eigen::VectorXd sphere_eigenvalues(int l_max);

// Real spherical harmonics for l <= l_max evaluated at unit vectors (rows of
// `points`), normalized in L^2 of the uniform probability measure, so the
// l = 0 column is the constant 1 and sum_m Y_lm(x)^2 = 2l + 1.
Eigen::MatrixXd sphere_harmonics(const Eigen::MatrixXd& points, int l_max);

SpectralCovariance sphere_oracle(const PointCloud& cloud, int l_max, const KernelSpec& spec);

}  // namespace gbo
