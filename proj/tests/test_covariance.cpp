#include <cmath>
#include <numbers>

#include "doctest.h"
#include "gbo/covariance.hpp"
#include "gbo/point_cloud.hpp"
#include "gbo/rng.hpp"
#include "test_util.hpp"

using namespace gbo;

namespace {

KernelSpec matern_spec(double kappa, double s, int k_n, int m) {
  KernelSpec spec;
  spec.family = KernelFamily::matern;
  spec.kappa = kappa;
  spec.s = s;
  spec.k_n = k_n;
  spec.m = m;
  return spec;
}

KernelSpec se_spec(double tau, int k_n, int m) {
  KernelSpec spec;
  spec.family = KernelFamily::se;
  spec.tau = tau;
  spec.k_n = k_n;
  spec.m = m;
  return spec;
}

}  // namespace

TEST_SUITE_BEGIN("covariance");

TEST_CASE("spectral coefficients match the closed forms") {
  Eigen::VectorXd lambda(4);
  lambda << 0.0, 1.3, 4.2, 11.0;

  const auto matern = spectral_coefficients(matern_spec(2.0, 1.5, 4, 1), lambda);
  for (int i = 0; i < 4; ++i) {
    const double expected = std::pow(2.0, 2.0 * 1.5 - 1.0) * std::pow(4.0 + lambda[i], -1.5);
    CHECK(matern[i] == doctest::Approx(expected).epsilon(1e-14));
  }

  const auto se = spectral_coefficients(se_spec(0.3, 4, 2), lambda);
  for (int i = 0; i < 4; ++i) {
    const double expected = 0.3 * std::exp(-lambda[i] * 0.3);
    CHECK(se[i] == doctest::Approx(expected).epsilon(1e-14));
  }

  // strictly decreasing in lambda, amplitude scales linearly
  for (int i = 1; i < 4; ++i) CHECK(matern[i] < matern[i - 1]);
  auto amp = matern_spec(2.0, 1.5, 4, 1);
  amp.amplitude = 2.5;
  const auto scaled = spectral_coefficients(amp, lambda);
  for (int i = 0; i < 4; ++i) CHECK(scaled[i] == doctest::Approx(2.5 * matern[i]).epsilon(1e-14));
}

TEST_CASE("kernel spec validation rejects nonsense") {
  CHECK_THROWS(validate(matern_spec(0.0, 2.0, 3, 1)));
  CHECK_THROWS(validate(matern_spec(1.0, -1.0, 3, 1)));
  CHECK_THROWS(validate(matern_spec(1.0, 2.0, 0, 1)));
  CHECK_THROWS(validate(se_spec(0.0, 3, 1)));
  CHECK_NOTHROW(validate(se_spec(0.2, 3, 2)));
}

TEST_CASE("spectral covariance equals the explicit mode sum") {
  const int n = 25, k = 6;
  const Eigen::MatrixXd basis = testutil::orthonormal_basis(n, k, 17);
  Eigen::VectorXd lambda(k);
  lambda << 0.0, 0.7, 1.1, 2.9, 5.0, 5.5;
  const auto spec = matern_spec(1.5, 2.0, k, 1);
  const SpectralCovariance model(basis, lambda, spec);

  const auto w = spectral_coefficients(spec, lambda);
  const Eigen::MatrixXd full = basis * w.asDiagonal() * basis.transpose();
  for (int i = 0; i < n; ++i) {
    CHECK(model.variance_diagonal()[i] == doctest::Approx(full(i, i)).epsilon(1e-12));
    for (int j = 0; j < n; ++j)
      CHECK(model.covariance(i, j) == doctest::Approx(full(i, j)).epsilon(1e-12));
  }

  const std::vector<int> queries = {3, 11, 19};
  const Eigen::MatrixXd cross = model.cross_covariance(queries);
  const Eigen::MatrixXd gram = model.covariance_matrix(queries);
  REQUIRE(cross.rows() == n);
  REQUIRE(cross.cols() == 3);
  for (int i = 0; i < n; ++i)
    for (int q = 0; q < 3; ++q)
      CHECK(cross(i, q) == doctest::Approx(full(i, queries[static_cast<std::size_t>(q)])).epsilon(1e-12));
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      CHECK(gram(a, b) ==
            doctest::Approx(full(queries[static_cast<std::size_t>(a)],
                                 queries[static_cast<std::size_t>(b)])).epsilon(1e-12));

  CHECK_THROWS(model.covariance(-1, 0));
  CHECK_THROWS(model.covariance(0, n));
}

TEST_CASE("prior draws reproduce the model covariance in Monte Carlo") {
  const int n = 12, k = 4;
  const Eigen::MatrixXd basis = testutil::orthonormal_basis(n, k, 31);
  Eigen::VectorXd lambda(k);
  lambda << 0.0, 1.0, 3.0, 8.0;
  const SpectralCovariance model(basis, lambda, matern_spec(1.0, 1.5, k, 1));

  const int draws = 60000;
  Rng rng(404);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  for (int d = 0; d < draws; ++d) {
    const Eigen::VectorXd u = model.sample(rng);
    acc += u * u.transpose();
    mean += u;
  }
  acc /= draws;
  mean /= draws;
  CHECK(mean.cwiseAbs().maxCoeff() < 0.02);

  double max_err = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      max_err = std::max(max_err, std::abs(acc(i, j) - model.covariance(i, j)));
  CHECK(max_err < 0.015);
}

TEST_CASE("sample_prior is seed-deterministic and seed-sensitive") {
  const auto cloud = testutil::equispaced_circle(60);
  const auto spec = spectrum(laplacian(build_weight_matrix(cloud, 0.4)), 8);
  const auto model = make_graph_model(spec, matern_spec(1.0, 2.0, 8, 1));
  const auto a = sample_prior(model, 5);
  const auto b = sample_prior(model, 5);
  const auto c = sample_prior(model, 6);
  CHECK((a - b).norm() == 0.0);
  CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("graph model truncates to k_n modes of the spectrum") {
  const auto cloud = testutil::equispaced_circle(80);
  const auto spec = spectrum(laplacian(build_weight_matrix(cloud, 0.35)), 12);
  const auto model = make_graph_model(spec, matern_spec(1.0, 2.0, 7, 1));
  CHECK(model.basis().cols() == 7);
  CHECK(model.eigenvalues().size() == 7);
  CHECK((model.eigenvalues() - spec.eigenvalues.head(7)).norm() == 0.0);
  CHECK_THROWS(make_graph_model(spec, matern_spec(1.0, 2.0, 13, 1)));
}

TEST_CASE("circle oracle lists the analytic eigenvalues in pairs") {
  const auto cloud = testutil::equispaced_circle(40);
  const auto model = circle_oracle(cloud, 9, matern_spec(1.0, 2.0, 9, 1));
  Eigen::VectorXd expected(9);
  expected << 0, 1, 1, 4, 4, 9, 9, 16, 16;
  CHECK((model.eigenvalues() - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("circle oracle basis is orthonormal under the empirical measure") {
  // on an equispaced cloud the trigonometric identities make the empirical
  // inner products exact up to rounding
  const int n = 240;
  const auto cloud = testutil::equispaced_circle(n);
  const auto model = circle_oracle(cloud, 11, matern_spec(1.0, 2.0, 11, 1));
  const Eigen::MatrixXd gram = model.basis().transpose() * model.basis() / double(n);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(11, 11);
  CHECK((gram - eye).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sphere eigenvalue table: l(l+1) with multiplicity 2l+1") {
  const auto lambda = sphere_eigenvalues(5);
  REQUIRE(lambda.size() == 36);
  CHECK(lambda[0] == 0.0);
  CHECK(lambda[35] == 30.0);
  int pos = 0;
  for (int l = 0; l <= 5; ++l)
    for (int m = 0; m < 2 * l + 1; ++m) CHECK(lambda[pos++] == double(l * (l + 1)));
}

TEST_CASE("sphere harmonics satisfy the addition theorem") {
  const auto cloud = sample_sphere(40, 300);
  const auto y = sphere_harmonics(cloud.points, 5);
  REQUIRE(y.rows() == 40);
  REQUIRE(y.cols() == 36);

  for (int a = 0; a < 40; a += 7) {
    for (int b = 0; b < 40; b += 5) {
      const double dot =
          std::clamp(cloud.points.row(a).dot(cloud.points.row(b)), -1.0, 1.0);
      int col = 0;
      for (int l = 0; l <= 5; ++l) {
        double acc = 0.0;
        for (int m = 0; m < 2 * l + 1; ++m, ++col) acc += y(a, col) * y(b, col);
        const double expected = (2.0 * l + 1.0) * std::legendre(l, dot);
        CHECK(acc == doctest::Approx(expected).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("sphere oracle wires the harmonic basis to the spectral filter") {
  const auto cloud = sample_sphere(30, 9);
  const auto model = sphere_oracle(cloud, 4, matern_spec(1.0, 2.0, 25, 2));
  CHECK(model.size() == 30);
  CHECK(model.basis().cols() == 25);
  CHECK(model.eigenvalues()[0] == 0.0);
  CHECK(model.eigenvalues()[24] == 20.0);
}

TEST_SUITE_END();
