#include "gbo/covariance.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gbo {

void validate(const KernelSpec& spec) {
  if (spec.k_n < 1) throw std::invalid_argument("kernel spec: k_n must be >= 1");
  if (spec.m < 1) throw std::invalid_argument("kernel spec: m must be >= 1");
  if (spec.amplitude <= 0.0) throw std::invalid_argument("kernel spec: amplitude must be positive");
  if (spec.family == KernelFamily::matern) {
    if (spec.kappa <= 0.0 || spec.s <= 0.0)
      throw std::invalid_argument("kernel spec: Matern needs kappa > 0 and s > 0");
  } else {
    if (spec.tau <= 0.0) throw std::invalid_argument("kernel spec: SE needs tau > 0");
  }
}

Eigen::VectorXd spectral_coefficients(const KernelSpec& spec, const Eigen::VectorXd& eigenvalues) {
  validate(spec);
  Eigen::VectorXd w(eigenvalues.size());
  if (spec.family == KernelFamily::matern) {
    const double front = std::pow(spec.kappa, 2.0 * spec.s - spec.m);
    for (int i = 0; i < w.size(); ++i)
      w[i] = front * std::pow(spec.kappa * spec.kappa + eigenvalues[i], -spec.s);
  } else {
    const double front = std::pow(spec.tau, 0.5 * spec.m);
    for (int i = 0; i < w.size(); ++i) w[i] = front * std::exp(-eigenvalues[i] * spec.tau);
  }
  return w * spec.amplitude;
}

void CovarianceModel::check_index(int i) const {
  if (i < 0 || i >= size()) throw std::out_of_range("point index out of range");
}

Eigen::MatrixXd CovarianceModel::cross_covariance(const std::vector<int>& queries) const {
  Eigen::MatrixXd out(size(), static_cast<int>(queries.size()));
  for (size_t q = 0; q < queries.size(); ++q)
    for (int i = 0; i < size(); ++i) out(i, static_cast<int>(q)) = covariance(i, queries[q]);
  return out;
}

Eigen::MatrixXd CovarianceModel::covariance_matrix(const std::vector<int>& indices) const {
  const int l = static_cast<int>(indices.size());
  Eigen::MatrixXd out(l, l);
  for (int a = 0; a < l; ++a) {
    for (int b = a; b < l; ++b) {
      double c = covariance(indices[a], indices[b]);
      out(a, b) = c;
      out(b, a) = c;
    }
  }
  return out;
}

SpectralCovariance::SpectralCovariance(Eigen::MatrixXd basis, Eigen::VectorXd eigenvalues,
                                       KernelSpec spec)
    : basis_(std::move(basis)), eigenvalues_(std::move(eigenvalues)), spec_(spec) {
  validate(spec_);
  if (basis_.cols() != eigenvalues_.size())
    throw std::invalid_argument("spectral model: basis/eigenvalue size mismatch");
  if (spec_.k_n > basis_.cols())
    throw std::invalid_argument("spectral model: k_n exceeds available modes");
  if (spec_.k_n < basis_.cols()) {
    basis_ = basis_.leftCols(spec_.k_n).eval();
    eigenvalues_ = eigenvalues_.head(spec_.k_n).eval();
  }
  weights_ = spectral_coefficients(spec_, eigenvalues_);
}

double SpectralCovariance::covariance(int i, int j) const {
  check_index(i);
  check_index(j);
  return (basis_.row(i).array() * basis_.row(j).array() * weights_.transpose().array()).sum();
}

Eigen::VectorXd SpectralCovariance::variance_diagonal() const {
  return basis_.array().square().matrix() * weights_;
}

Eigen::MatrixXd SpectralCovariance::cross_covariance(const std::vector<int>& queries) const {
  const int l = static_cast<int>(queries.size());
  Eigen::MatrixXd at_queries(l, basis_.cols());
  for (int q = 0; q < l; ++q) {
    check_index(queries[q]);
    at_queries.row(q) = basis_.row(queries[q]);
  }
  return basis_ * (weights_.asDiagonal() * at_queries.transpose());
}

Eigen::MatrixXd SpectralCovariance::covariance_matrix(const std::vector<int>& indices) const {
  const int l = static_cast<int>(indices.size());
  Eigen::MatrixXd at_queries(l, basis_.cols());
  for (int q = 0; q < l; ++q) {
    check_index(indices[q]);
    at_queries.row(q) = basis_.row(indices[q]);
  }
  return at_queries * weights_.asDiagonal() * at_queries.transpose();
}

Eigen::VectorXd SpectralCovariance::sample(Rng& rng) const {
  Eigen::VectorXd coeffs(weights_.size());
  for (int i = 0; i < coeffs.size(); ++i) coeffs[i] = std::sqrt(weights_[i]) * rng.normal();
  return basis_ * coeffs;
}

SpectralCovariance make_graph_model(const GraphSpectrum& spectrum, const KernelSpec& spec) {
  if (spec.k_n > spectrum.k())
    throw std::invalid_argument("make_graph_model: k_n exceeds computed spectrum size");
  return SpectralCovariance(spectrum.eigenvectors, spectrum.eigenvalues, spec);
}

Eigen::VectorXd sample_prior(const SpectralCovariance& model, std::uint64_t seed) {
  Rng rng(seed);
  return model.sample(rng);
}

SpectralCovariance circle_oracle(const PointCloud& cloud, int K, const KernelSpec& spec) {
  validate(cloud);
  if (cloud.ambient_dim() != 2) throw std::invalid_argument("circle_oracle: cloud must live in R^2");
  if (K < 1) throw std::invalid_argument("circle_oracle: K must be >= 1");

  const int n = cloud.size();
  Eigen::VectorXd lambda(K);
  Eigen::MatrixXd basis(n, K);
  Eigen::VectorXd theta(n);
  for (int i = 0; i < n; ++i) theta[i] = std::atan2(cloud.points(i, 1), cloud.points(i, 0));

  const double root2 = std::numbers::sqrt2;
  for (int j = 0; j < K; ++j) {
    if (j == 0) {
      lambda[j] = 0.0;
      basis.col(j).setOnes();
      continue;
    }
    int freq = (j + 1) / 2;
    lambda[j] = static_cast<double>(freq) * freq;
    if (j % 2 == 1)
      basis.col(j) = (root2 * (freq * theta.array()).cos()).matrix();
    else
      basis.col(j) = (root2 * (freq * theta.array()).sin()).matrix();
  }

  KernelSpec oracle_spec = spec;
  oracle_spec.k_n = K;
  oracle_spec.m = 1;
  return SpectralCovariance(std::move(basis), std::move(lambda), oracle_spec);
}

Eigen::VectorXd sphere_eigenvalues(int l_max) {
  if (l_max < 0) throw std::invalid_argument("sphere_eigenvalues: l_max must be >= 0");
  const int count = (l_max + 1) * (l_max + 1);
  Eigen::VectorXd lambda(count);
  int pos = 0;
  for (int l = 0; l <= l_max; ++l)
    for (int m = 0; m < 2 * l + 1; ++m) lambda[pos++] = static_cast<double>(l) * (l + 1);
  return lambda;
}

// Fully normalized associated Legendre values S_lm(x) with
// sum_m S_lm^2 contributions matching orthonormality on the 4*pi sphere;
// Condon-Shortley phase included through the diagonal recurrence.
static void normalized_legendre(int l_max, double x, double sin_theta, Eigen::MatrixXd& S) {
  const double inv_sqrt4pi = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  S(0, 0) = inv_sqrt4pi;
  for (int m = 1; m <= l_max; ++m)
    S(m, m) = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * sin_theta * S(m - 1, m - 1);
  for (int m = 0; m < l_max; ++m) S(m + 1, m) = std::sqrt(2.0 * m + 3.0) * x * S(m, m);
  for (int m = 0; m <= l_max; ++m) {
    for (int l = m + 2; l <= l_max; ++l) {
      double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      double b = std::sqrt((double(l - 1) * (l - 1) - double(m) * m) / (4.0 * double(l - 1) * (l - 1) - 1.0));
      S(l, m) = a * (x * S(l - 1, m) - b * S(l - 2, m));
    }
  }
}

Eigen::MatrixXd sphere_harmonics(const Eigen::MatrixXd& points, int l_max) {
  if (points.cols() != 3) throw std::invalid_argument("sphere_harmonics: points must live in R^3");
  const int n = static_cast<int>(points.rows());
  const int count = (l_max + 1) * (l_max + 1);
  Eigen::MatrixXd out(n, count);
  Eigen::MatrixXd S(l_max + 1, l_max + 1);
  const double sqrt4pi = std::sqrt(4.0 * std::numbers::pi);
  const double root2 = std::numbers::sqrt2;

  for (int i = 0; i < n; ++i) {
    double px = points(i, 0), py = points(i, 1), pz = points(i, 2);
    double norm = std::sqrt(px * px + py * py + pz * pz);
    if (std::abs(norm - 1.0) > 1e-8)
      throw std::invalid_argument("sphere_harmonics: point not on the unit sphere");
    double ct = pz / norm;
    double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    double phi = std::atan2(py, px);
    normalized_legendre(l_max, ct, st, S);

    int pos = 0;
    for (int l = 0; l <= l_max; ++l) {
      // order within l: m = 0, then cos/sin pairs for m = 1..l
      out(i, pos++) = sqrt4pi * S(l, 0);
      for (int m = 1; m <= l; ++m) {
        out(i, pos++) = sqrt4pi * root2 * S(l, m) * std::cos(m * phi);
        out(i, pos++) = sqrt4pi * root2 * S(l, m) * std::sin(m * phi);
      }
    }
  }
  return out;
}

SpectralCovariance sphere_oracle(const PointCloud& cloud, int l_max, const KernelSpec& spec) {
  validate(cloud);
  if (cloud.ambient_dim() != 3) throw std::invalid_argument("sphere_oracle: cloud must live in R^3");
  KernelSpec oracle_spec = spec;
  oracle_spec.k_n = (l_max + 1) * (l_max + 1);
  oracle_spec.m = 2;
  return SpectralCovariance(sphere_harmonics(cloud.points, l_max), sphere_eigenvalues(l_max),
                            oracle_spec);
}

}  // namespace gbo
