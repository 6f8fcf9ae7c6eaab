#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "doctest.h"
#include "gbo/posterior.hpp"
#include "gbo/rng.hpp"
#include "test_util.hpp"

using namespace gbo;

namespace {

std::shared_ptr<SpectralCovariance> random_model(int n, int k, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> unif(0.1, 3.0);
  Eigen::VectorXd lambda(k);
  double level = 0.0;
  for (int i = 0; i < k; ++i) {
    lambda[i] = level;
    level += unif(gen);
  }
  KernelSpec spec;
  spec.family = KernelFamily::matern;
  spec.kappa = unif(gen);
  spec.s = 1.0 + unif(gen);
  spec.k_n = k;
  spec.m = 1;
  return std::make_shared<SpectralCovariance>(testutil::orthonormal_basis(n, k, seed + 1),
                                              lambda, spec);
}

std::vector<int> distinct_queries(int n, int l, std::mt19937& gen) {
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), gen);
  all.resize(static_cast<std::size_t>(l));
  return all;
}

}  // namespace

TEST_SUITE_BEGIN("posterior");

TEST_CASE("conditioning matches dense joint-Gaussian formulas") {
  // oracle: mu = C_xq (C_qq + s^2 I)^{-1} y, var = C_xx - C_xq (...)^{-1} C_qx
  // computed here with an eigendecomposition-based inverse, a different
  // algorithm than the production Cholesky path
  std::mt19937 gen(2024);
  std::uniform_int_distribution<int> n_dist(8, 40), l_dist(1, 8), k_dist(2, 10);
  const double sigmas[] = {0.01, 0.1, 1.0};

  for (int rep = 0; rep < 50; ++rep) {
    const int n = n_dist(gen);
    const int k = std::min(k_dist(gen), n);
    const int l = std::min(l_dist(gen), n);
    const double sigma = sigmas[rep % 3];
    const auto model = random_model(n, k, 3000 + rep);
    const auto queries = distinct_queries(n, l, gen);

    Eigen::VectorXd y(l);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < l; ++i) y[i] = normal(gen);

    const auto state = condition(model, queries, y, sigma);
    REQUIRE(state.jitter == 0.0);

    Eigen::MatrixXd full(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) full(i, j) = model->covariance(i, j);
    Eigen::MatrixXd cqq(l, l);
    Eigen::MatrixXd cxq(n, l);
    for (int a = 0; a < l; ++a) {
      for (int b = 0; b < l; ++b)
        cqq(a, b) = full(queries[static_cast<std::size_t>(a)], queries[static_cast<std::size_t>(b)]);
      cxq.col(a) = full.col(queries[static_cast<std::size_t>(a)]);
    }
    const Eigen::MatrixXd noisy = cqq + sigma * sigma * Eigen::MatrixXd::Identity(l, l);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(noisy);
    const Eigen::MatrixXd inv =
        eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
        eig.eigenvectors().transpose();
    const Eigen::VectorXd mu = cxq * inv * y;
    const Eigen::MatrixXd cov = full - cxq * inv * cxq.transpose();

    const auto mean_all = posterior_mean_all(state);
    const auto std_all = posterior_std_all(state);
    for (int z = 0; z < n; ++z) {
      CHECK(std::abs(posterior_mean(state, z) - mu[z]) < 1e-8);
      CHECK(std::abs(mean_all[z] - mu[z]) < 1e-8);
      const double var = std::max(cov(z, z), 0.0);
      CHECK(std::abs(posterior_std(state, z) - std::sqrt(var)) < 1e-8);
      CHECK(std::abs(std_all[z] - std::sqrt(var)) < 1e-8);
    }
  }
}

TEST_CASE("noiseless conditioning interpolates the observations") {
  const auto model = random_model(20, 12, 99);
  const std::vector<int> queries = {2, 7, 11};
  Eigen::VectorXd y(3);
  y << 0.4, -1.2, 0.9;
  const auto state = condition(model, queries, y, 0.0);
  for (int i = 0; i < 3; ++i) {
    CHECK(posterior_mean(state, queries[static_cast<std::size_t>(i)]) ==
          doctest::Approx(y[i]).epsilon(1e-7));
    CHECK(posterior_std(state, queries[static_cast<std::size_t>(i)]) < 1e-4);
  }
}

TEST_CASE("posterior variance never exceeds prior variance and stays nonnegative") {
  const auto model = random_model(30, 6, 123);
  std::mt19937 gen(5);
  const auto queries = distinct_queries(30, 6, gen);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(6);
  const auto state = condition(model, queries, y, 0.05);
  const auto sd = posterior_std_all(state);
  const auto prior = model->variance_diagonal();
  for (int z = 0; z < 30; ++z) {
    CHECK(sd[z] >= 0.0);
    CHECK(sd[z] * sd[z] <= prior[z] + 1e-12);
  }
}

TEST_CASE("empty query list returns the prior") {
  const auto model = random_model(15, 5, 7);
  const auto state = condition(model, {}, Eigen::VectorXd(), 0.1);
  const auto mean = posterior_mean_all(state);
  const auto sd = posterior_std_all(state);
  const auto prior = model->variance_diagonal();
  for (int z = 0; z < 15; ++z) {
    CHECK(mean[z] == 0.0);
    CHECK(sd[z] == doctest::Approx(std::sqrt(prior[z])).epsilon(1e-12));
  }
}

TEST_CASE("rank-deficient noiseless systems engage the jitter ladder") {
  // rank-1 model, two distinct queries, sigma = 0: the Gram matrix is
  // singular, so a successful factorization must report positive jitter
  const auto model = random_model(10, 1, 55);
  Eigen::VectorXd y(2);
  const double c0 = model->covariance(0, 0);
  const double ratio = model->covariance(4, 0) / c0;
  y << 1.0, ratio;  // consistent with the rank-1 structure
  const auto state = condition(model, {0, 4}, y, 0.0);
  CHECK(state.jitter > 0.0);
  CHECK(std::isfinite(posterior_mean(state, 7)));
  CHECK(std::isfinite(posterior_std(state, 7)));
}

TEST_CASE("factorize_with_jitter reports zero jitter on well-posed systems") {
  Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(4, 4) * 2.0;
  Eigen::LLT<Eigen::MatrixXd> llt;
  CHECK(factorize_with_jitter(gram, 0.1, llt) == 0.0);
  CHECK(llt.info() == Eigen::Success);
}

TEST_CASE("condition validates its inputs") {
  const auto model = random_model(10, 3, 1);
  Eigen::VectorXd y(2);
  y << 0.0, 1.0;
  CHECK_THROWS(condition(model, {0}, y, 0.1));        // size mismatch
  CHECK_THROWS(condition(model, {0, 99}, y, 0.1));    // out of range
  CHECK_THROWS(condition(model, {0, 1}, y, -0.5));    // negative noise
}

TEST_SUITE_END();
