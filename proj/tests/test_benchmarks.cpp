#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "gbo/benchmarks.hpp"
#include "gbo/graph.hpp"
#include "gbo/point_cloud.hpp"
#include "test_util.hpp"

using namespace gbo;

namespace {

constexpr double kPi = std::numbers::pi;

// modified spherical Bessel of the first kind, i_l(x)
double bessel_i_spherical(int l, double x) {
  return std::sqrt(kPi / (2.0 * x)) * std::cyl_bessel_i(l + 0.5, x);
}

EuclideanKernel matern_kernel(double nu, double kappa) {
  EuclideanKernel kernel;
  kernel.family = EuclideanFamily::matern;
  kernel.nu = nu;
  kernel.kappa = kappa;
  return kernel;
}

}  // namespace

TEST_SUITE_BEGIN("benchmarks");

TEST_CASE("all three circle functions vanish at the origin") {
  CHECK(std::abs(levy(0.0)) < 1e-14);
  CHECK(std::abs(ackley(0.0)) < 1e-14);
  CHECK(std::abs(rastrigin(0.0)) < 1e-14);
}

TEST_CASE("closed forms agree with independent recomputation") {
  for (double theta : {-3.0, -1.2, 0.4, 1.0, 2.9}) {
    const double levy_ref = std::pow(0.75 * theta, 2) *
                            (1.0 + std::pow(std::sin(kPi * (3.0 * theta + 3.0) / 2.0), 2));
    CHECK(levy(theta) == doctest::Approx(levy_ref).epsilon(1e-14));

    const double ackley_ref = -20.0 * std::exp(-0.1 * theta) -
                              std::exp(std::cos(2.0 * kPi * theta)) + 20.0 + std::exp(1.0);
    CHECK(ackley(theta) == doctest::Approx(ackley_ref).epsilon(1e-14));

    const double rastrigin_ref = 2.0 + theta * theta - 2.0 * std::cos(2.0 * kPi * theta);
    CHECK(rastrigin(theta) == doctest::Approx(rastrigin_ref).epsilon(1e-14));
  }
}

TEST_CASE("name lookup lists and resolves the three functions") {
  const auto names = benchmark_names();
  REQUIRE(names.size() == 3);
  for (const auto& name : names) {
    const auto fn = circle_benchmark(name);
    CHECK(std::abs(fn(0.0)) < 1e-14);
  }
  CHECK(circle_benchmark("levy")(2.0) == levy(2.0));
  CHECK_THROWS(circle_benchmark("unknown"));
}

TEST_CASE("cloud angles come from atan2 and need a planar cloud") {
  const auto cloud = sample_circle(50, 12);
  const auto angles = cloud_angles(cloud);
  REQUIRE(angles.size() == 50);
  for (int i = 0; i < 50; ++i) {
    CHECK(angles[i] == std::atan2(cloud.points(i, 1), cloud.points(i, 0)));
    CHECK(angles[i] >= -kPi);
    CHECK(angles[i] < kPi + 1e-15);
  }
  const auto sphere = sample_sphere(10, 4);
  CHECK_THROWS(cloud_angles(sphere));
}

TEST_CASE("SE Euclidean kernel is a Gaussian in distance") {
  EuclideanKernel kernel;
  kernel.family = EuclideanFamily::se;
  kernel.tau = 0.07;
  CHECK(euclidean_covariance(kernel, 0.0) == 1.0);
  for (double r : {0.1, 0.5, 1.3}) {
    CHECK(euclidean_covariance(kernel, r) ==
          doctest::Approx(std::exp(-r * r / (4.0 * 0.07))).epsilon(1e-14));
  }
}

TEST_CASE("Matern nu = 1/2 collapses to the exponential kernel") {
  const auto kernel = matern_kernel(0.5, 2.3);
  for (double r : {0.05, 0.31, 0.9, 2.0}) {
    CHECK(std::abs(euclidean_covariance(kernel, r) - std::exp(-2.3 * r)) < 1e-10);
  }
  CHECK(euclidean_covariance(kernel, 0.0) == 1.0);
}

TEST_CASE("Matern closed forms match a direct Bessel evaluation") {
  // 2^{1-nu}/Gamma(nu) x^nu K_nu(x), evaluated here straight from cmath
  for (double nu : {0.5, 1.5, 2.5, 1.7}) {
    const auto kernel = matern_kernel(nu, 1.4);
    for (double r : {0.1, 0.6, 1.8}) {
      const double x = 1.4 * r;
      const double reference = std::pow(2.0, 1.0 - nu) / std::tgamma(nu) * std::pow(x, nu) *
                               std::cyl_bessel_k(nu, x);
      CHECK(euclidean_covariance(kernel, r) == doctest::Approx(reference).epsilon(1e-10));
    }
  }
}

TEST_CASE("Euclidean Gram matrices are positive semidefinite") {
  const auto cloud = sample_sphere(50, 33);
  std::vector<EuclideanKernel> kernels = {matern_kernel(0.5, 2.0), matern_kernel(1.5, 5.0),
                                          matern_kernel(2.5, 1.0)};
  EuclideanKernel se;
  se.family = EuclideanFamily::se;
  se.tau = 0.05;
  kernels.push_back(se);

  std::vector<int> all(50);
  std::iota(all.begin(), all.end(), 0);
  for (const auto& kernel : kernels) {
    const EuclideanCovariance model(cloud.points, kernel);
    CHECK(model.size() == 50);
    const Eigen::MatrixXd gram = model.covariance_matrix(all);
    CHECK((gram - gram.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    CHECK(eig.eigenvalues().minCoeff() > -1e-10);
    for (int i = 0; i < 50; ++i) CHECK(gram(i, i) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("Euclidean kernel validation") {
  CHECK_THROWS(validate(matern_kernel(0.0, 1.0)));
  CHECK_THROWS(validate(matern_kernel(1.0, -2.0)));
  EuclideanKernel se;
  se.family = EuclideanFamily::se;
  se.tau = 0.0;
  CHECK_THROWS(validate(se));
  CHECK_NOTHROW(validate(matern_kernel(1.5, 3.0)));
}

TEST_CASE("vMF quadrature coefficients match the Bessel expansion") {
  // e^{zeta z.x} = sum_l (2l+1) i_l(zeta) P_l(z.x) gives, for probability-
  // normalized harmonics, E[phi_0 Y_lm] = i_l(zeta) Y_lm(z); the empirical
  // average over quasi-uniform nodes must reproduce it
  const int n = 40000;
  const auto cloud = testutil::fibonacci_sphere(n);
  const auto y = sphere_harmonics(cloud.points, 5);

  Eigen::Vector3d z(0.3, -0.5, std::sqrt(1.0 - 0.09 - 0.25));
  const double zeta = 2.0;
  Eigen::VectorXd phi0(n);
  for (int i = 0; i < n; ++i) phi0[i] = std::exp(zeta * z.dot(cloud.points.row(i)));

  const Eigen::VectorXd coeff = y.transpose() * phi0 / double(n);
  const Eigen::MatrixXd yz = sphere_harmonics(z.transpose(), 5);

  int col = 0;
  for (int l = 0; l <= 5; ++l) {
    const double il = bessel_i_spherical(l, zeta);
    for (int m = 0; m < 2 * l + 1; ++m, ++col) {
      CHECK(std::abs(coeff[col] - il * yz(0, col)) < 1e-3);
    }
  }
}

TEST_CASE("heat problem data follows the truncated analytic expansion") {
  const auto cloud = sample_sphere(250, 60);
  const double h = 4.0 * std::pow(250.0, -0.25);
  const auto spec = spectrum(laplacian(build_weight_matrix(cloud, h)), 20);

  const int z_star = 7;
  const double zeta = 2.0, t = 0.3;
  const auto problem = make_heat_problem(cloud, spec, zeta, z_star, t, 0.0, 5, 1);

  // independent recomputation of the noise-free data
  const auto y = sphere_harmonics(cloud.points, 5);
  Eigen::VectorXd phi0(250);
  for (int i = 0; i < 250; ++i)
    phi0[i] = std::exp(zeta * cloud.points.row(z_star).dot(cloud.points.row(i)));
  const Eigen::VectorXd coeff = y.transpose() * phi0 / 250.0;
  const auto lambda = sphere_eigenvalues(5);
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(250);
  for (int i = 0; i < 36; ++i)
    expected += coeff[i] * std::exp(-lambda[i] * t) * y.col(i);
  CHECK((problem.data - expected).cwiseAbs().maxCoeff() < 1e-12);

  // mode-0 conservation: the data lies in the harmonic span, so re-projecting
  // recovers coeff_i e^{-lambda_i t} exactly, and the l = 0 entry never decays
  const Eigen::VectorXd recovered = y.colPivHouseholderQr().solve(problem.data);
  CHECK(std::abs(recovered[0] - coeff[0]) < 1e-9);
  const auto later = make_heat_problem(cloud, spec, zeta, z_star, 0.9, 0.0, 5, 1);
  const Eigen::VectorXd recovered_later = y.colPivHouseholderQr().solve(later.data);
  CHECK(std::abs(recovered_later[0] - coeff[0]) < 1e-9);
  for (int i = 1; i < 36; ++i)
    CHECK(std::abs(recovered_later[i]) <= std::abs(recovered[i]) + 1e-9);

  // seeded noise perturbs the clean data at the requested scale
  const auto noisy = make_heat_problem(cloud, spec, zeta, z_star, t, 0.1, 5, 1);
  const Eigen::VectorXd eta = noisy.data - problem.data;
  CHECK(eta.cwiseAbs().maxCoeff() > 0.0);
  const double sd = std::sqrt(eta.squaredNorm() / 250.0);
  CHECK(sd == doctest::Approx(0.1).epsilon(0.2));
  const auto noisy2 = make_heat_problem(cloud, spec, zeta, z_star, t, 0.1, 5, 1);
  CHECK((noisy2.data - noisy.data).norm() == 0.0);
}

TEST_CASE("heat objective self-match caps when the data is exactly producible") {
  const auto cloud = sample_sphere(200, 61);
  const auto spec = spectrum(laplacian(build_weight_matrix(cloud, 0.6)), 15);
  auto problem = make_heat_problem(cloud, spec, 2.0, 3, 0.25, 0.0, 5, 2);

  // overwrite the data with the graph forward value at z = 3, mirroring the
  // objective's own expression so the residual is exactly zero
  const Eigen::RowVector3d center = problem.cloud.points.row(3);
  const Eigen::VectorXd phi =
      (problem.zeta * (problem.cloud.points * center.transpose())).array().exp();
  const Eigen::VectorXd w = problem.basis.transpose() * phi;
  problem.data = problem.basis * (problem.decay.asDiagonal() * w);
  CHECK(heat_objective(problem, 3) == 1e12);

  // any other candidate leaves a residual and scores lower
  CHECK(heat_objective(problem, 150) < 1e12);
}

TEST_CASE("exhaustive heat tabulation equals pointwise evaluation") {
  const auto cloud = sample_sphere(300, 62);
  const auto spec = spectrum(laplacian(build_weight_matrix(cloud, 0.55)), 18);
  const auto problem = make_heat_problem(cloud, spec, 2.0, 11, 0.25, 0.1, 5, 3);
  const auto all = heat_objective_all(problem);
  REQUIRE(all.size() == 300);
  for (int z = 0; z < 300; z += 13)
    CHECK(all[z] == doctest::Approx(heat_objective(problem, z)).epsilon(1e-12));

  // the tabulated maximizer sits near the source at small t
  Eigen::Index arg = 0;
  all.maxCoeff(&arg);
  const double dist = (cloud.points.row(static_cast<int>(arg)) - cloud.points.row(11)).norm();
  CHECK(dist < 0.7);
}

TEST_CASE("heat problem validates its inputs") {
  const auto cloud = sample_sphere(100, 70);
  const auto spec = spectrum(laplacian(build_weight_matrix(cloud, 0.7)), 10);
  CHECK_THROWS(make_heat_problem(cloud, spec, -1.0, 0, 0.25, 0.0, 5, 1));  // zeta
  CHECK_THROWS(make_heat_problem(cloud, spec, 2.0, -1, 0.25, 0.0, 5, 1));  // source index
  CHECK_THROWS(make_heat_problem(cloud, spec, 2.0, 0, -0.1, 0.0, 5, 1));   // time
  auto off_sphere = cloud;
  off_sphere.points *= 1.5;
  CHECK_THROWS(make_heat_problem(off_sphere, spec, 2.0, 0, 0.25, 0.0, 5, 1));
}

TEST_CASE("relative noise rule scales with the root mean square") {
  Eigen::VectorXd truth(4);
  truth << 3.0, -3.0, 3.0, -3.0;
  CHECK(noise_from_truth(truth, 0.05) == doctest::Approx(0.15).epsilon(1e-14));
  CHECK(noise_from_truth(truth, 0.0) == 0.0);
}

TEST_SUITE_END();
