#include "gbo/mle.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "gbo/posterior.hpp"

namespace gbo {

Eigen::VectorXd log_spaced_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("grid needs 0 < lo < hi");
  if (count < 2) throw std::invalid_argument("grid needs at least two points");
  Eigen::VectorXd grid(count);
  const double step = (std::log(hi) - std::log(lo)) / (count - 1);
  for (int i = 0; i < count; ++i) grid[i] = std::exp(std::log(lo) + step * i);
  grid[0] = lo;
  grid[count - 1] = hi;
  return grid;
}

namespace {

double gaussian_nll(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y, double noise_sd) {
  Eigen::LLT<Eigen::MatrixXd> llt;
  factorize_with_jitter(gram, noise_sd, llt);
  const Eigen::VectorXd alpha = llt.solve(y);
  double logdet = 0.0;
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i) logdet += 2.0 * std::log(l(i, i));
  const double quad = y.dot(alpha);
  return 0.5 * (quad + logdet + y.size() * std::log(2.0 * std::numbers::pi));
}

}  // namespace

double negative_log_likelihood(const CovarianceModel& model, const std::vector<int>& queries,
                               const Eigen::VectorXd& observations, double noise_sd) {
  if (queries.empty()) throw std::invalid_argument("likelihood needs at least one observation");
  if (static_cast<Eigen::Index>(queries.size()) != observations.size())
    throw std::invalid_argument("query and observation counts disagree");
  if (noise_sd < 0.0) throw std::invalid_argument("noise level must be nonnegative");
  return gaussian_nll(model.covariance_matrix(queries), observations, noise_sd);
}

KernelSpec with_free_parameter(KernelSpec base, double value) {
  if (base.family == KernelFamily::matern)
    base.s = value;
  else
    base.tau = value;
  return base;
}

double free_parameter(const KernelSpec& spec) {
  return spec.family == KernelFamily::matern ? spec.s : spec.tau;
}

Eigen::VectorXd default_grid(KernelFamily family) {
  return family == KernelFamily::matern ? log_spaced_grid(1.0, 10.0, 25)
                                        : log_spaced_grid(0.01, 1.0, 25);
}

MleResult estimate(const GraphSpectrum& spectrum, const KernelSpec& base,
                   const std::vector<int>& queries, const Eigen::VectorXd& observations,
                   double noise_sd, const Eigen::VectorXd& grid) {
  if (grid.size() < 1) throw std::invalid_argument("empty hyperparameter grid");
  if (queries.empty()) throw std::invalid_argument("likelihood needs at least one observation");
  if (static_cast<Eigen::Index>(queries.size()) != observations.size())
    throw std::invalid_argument("query and observation counts disagree");
  if (base.k_n > spectrum.k())
    throw std::invalid_argument("truncation exceeds the computed spectrum");

  const auto l = static_cast<Eigen::Index>(queries.size());
  Eigen::MatrixXd restricted(l, base.k_n);
  for (Eigen::Index i = 0; i < l; ++i)
    restricted.row(i) = spectrum.eigenvectors.row(queries[static_cast<std::size_t>(i)]).head(base.k_n);
  const Eigen::VectorXd lambdas = spectrum.eigenvalues.head(base.k_n);

  MleResult result;
  result.grid = grid;
  result.nll_values.resize(grid.size());
  int best = -1;
  for (Eigen::Index g = 0; g < grid.size(); ++g) {
    const KernelSpec candidate = with_free_parameter(base, grid[g]);
    validate(candidate);
    const Eigen::VectorXd w = spectral_coefficients(candidate, lambdas);
    const Eigen::MatrixXd gram = restricted * w.asDiagonal() * restricted.transpose();
    result.nll_values[g] = gaussian_nll(gram, observations, noise_sd);
    if (best < 0 || result.nll_values[g] < result.nll_values[best]) best = static_cast<int>(g);
  }
  result.parameter = grid[best];
  result.nll = result.nll_values[best];
  result.spec = with_free_parameter(base, result.parameter);
  return result;
}

ModelRefitter make_refitter(const GraphSpectrum& spectrum, KernelSpec base, double noise_sd,
                            Eigen::VectorXd grid, int stride) {
  if (stride < 1) throw std::invalid_argument("refit stride must be at least 1");
  auto cache = std::make_shared<std::shared_ptr<const CovarianceModel>>();
  return [spectrum, base, noise_sd, grid = std::move(grid), stride, cache](
             const std::vector<int>& queries, const Eigen::VectorXd& values,
             int iteration) -> std::shared_ptr<const CovarianceModel> {
    if (*cache && (iteration - 1) % stride != 0) return *cache;
    const MleResult fit = estimate(spectrum, base, queries, values, noise_sd, grid);
    *cache = std::make_shared<SpectralCovariance>(make_graph_model(spectrum, fit.spec));
    return *cache;
  };
}

}  // namespace gbo
