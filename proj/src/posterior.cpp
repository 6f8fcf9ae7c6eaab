#include "gbo/posterior.hpp"

#include <cmath>
#include <stdexcept>

#include "gbo/errors.hpp"

namespace gbo {

double factorize_with_jitter(const Eigen::MatrixXd& gram, double noise_sd,
                             Eigen::LLT<Eigen::MatrixXd>& llt) {
  const int l = static_cast<int>(gram.rows());
  const double sigma2 = noise_sd * noise_sd;
  double trace_scale = l > 0 ? std::max(gram.trace() / l, 1e-300) : 1.0;

  // sigma > 0 already regularizes; a zero-noise system always gets the base jitter
  double jitter = noise_sd > 0.0 ? 0.0 : 1e-10 * trace_scale;
  for (;;) {
    Eigen::MatrixXd sys = gram;
    sys.diagonal().array() += sigma2 + jitter;
    llt.compute(sys);
    if (llt.info() == Eigen::Success) {
      // LLT can succeed spuriously on near-singular input; accept only if the
      // smallest pivot is safely away from zero at double precision
      double min_diag = llt.matrixLLT().diagonal().minCoeff();
      if (std::isfinite(min_diag) && min_diag > 1e-7 * std::sqrt(trace_scale)) return jitter;
    }
    if (jitter == 0.0)
      jitter = 1e-10 * trace_scale;
    else
      jitter *= 10.0;
    if (jitter > 1e-6 * trace_scale * 1.0000001)
      throw NumericalError("factorization failed after jitter escalation");
  }
}

PosteriorState condition(std::shared_ptr<const CovarianceModel> model, std::vector<int> queries,
                         Eigen::VectorXd observations, double noise_sd) {
  if (!model) throw std::invalid_argument("condition: null model");
  if (static_cast<Eigen::Index>(queries.size()) != observations.size())
    throw std::invalid_argument("condition: queries and observations differ in length");
  if (noise_sd < 0.0) throw std::invalid_argument("condition: noise_sd must be >= 0");
  if (!observations.allFinite()) throw std::invalid_argument("condition: non-finite observation");

  PosteriorState state;
  state.model = std::move(model);
  state.queries = std::move(queries);
  state.observations = std::move(observations);
  state.noise_sd = noise_sd;
  if (state.queries.empty()) return state;  // prior state

  Eigen::MatrixXd gram = state.model->covariance_matrix(state.queries);
  state.jitter = factorize_with_jitter(gram, noise_sd, state.factorization);
  state.alpha = state.factorization.solve(state.observations);
  return state;
}

double posterior_mean(const PosteriorState& state, int z) {
  if (z < 0 || z >= state.model->size()) throw std::out_of_range("posterior_mean: index out of range");
  if (state.queries.empty()) return 0.0;
  double acc = 0.0;
  for (size_t q = 0; q < state.queries.size(); ++q)
    acc += state.model->covariance(z, state.queries[q]) * state.alpha[static_cast<Eigen::Index>(q)];
  return acc;
}

double posterior_std(const PosteriorState& state, int z) {
  if (z < 0 || z >= state.model->size()) throw std::out_of_range("posterior_std: index out of range");
  double prior = state.model->covariance(z, z);
  if (state.queries.empty()) return std::sqrt(std::max(0.0, prior));
  Eigen::VectorXd cz(static_cast<Eigen::Index>(state.queries.size()));
  for (size_t q = 0; q < state.queries.size(); ++q)
    cz[static_cast<Eigen::Index>(q)] = state.model->covariance(z, state.queries[q]);
  double reduction = cz.dot(state.factorization.solve(cz));
  return std::sqrt(std::max(0.0, prior - reduction));
}

Eigen::VectorXd posterior_mean_all(const PosteriorState& state) {
  const int n = state.model->size();
  if (state.queries.empty()) return Eigen::VectorXd::Zero(n);
  return state.model->cross_covariance(state.queries) * state.alpha;
}

Eigen::VectorXd posterior_std_all(const PosteriorState& state) {
  Eigen::VectorXd variance = state.model->variance_diagonal();
  if (!state.queries.empty()) {
    Eigen::MatrixXd cross = state.model->cross_covariance(state.queries);  // N x l
    // rows of V are L^{-1} c(z); variance reduction is their squared norm
    Eigen::MatrixXd v = state.factorization.matrixL().solve(cross.transpose());
    variance -= v.colwise().squaredNorm().transpose();
  }
  return variance.cwiseMax(0.0).cwiseSqrt();
}

}  // namespace gbo
