#include "gbo/graph.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "gbo/errors.hpp"

namespace gbo {

double unit_ball_volume(int m) {
  if (m < 1) throw std::invalid_argument("unit_ball_volume: m must be positive");
  return std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m + 1.0);
}

WeightedGraph build_weight_matrix(const PointCloud& cloud, double h) {
  validate(cloud);
  if (h <= 0.0) throw std::invalid_argument("build_weight_matrix: h must be positive");

  const int n = cloud.size();
  const int m = cloud.intrinsic_dim;
  const double coeff = 2.0 * (m + 2) / (n * unit_ball_volume(m) * std::pow(h, m + 2));
  const double h2 = h * h;

  std::vector<Eigen::Triplet<double>> triplets;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double d2 = (cloud.points.row(i) - cloud.points.row(j)).squaredNorm();
      if (d2 < h2) {
        triplets.emplace_back(i, j, coeff);
        triplets.emplace_back(j, i, coeff);
      }
    }
  }

  WeightedGraph graph;
  graph.weights.resize(n, n);
  graph.weights.setFromTriplets(triplets.begin(), triplets.end());
  graph.h = h;
  graph.coefficient = coeff;
  return graph;
}

Eigen::SparseMatrix<double> laplacian(const WeightedGraph& graph) {
  const int n = static_cast<int>(graph.weights.rows());
  Eigen::VectorXd degree = graph.weights * Eigen::VectorXd::Ones(n);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(graph.weights.nonZeros() + n);
  for (int outer = 0; outer < graph.weights.outerSize(); ++outer)
    for (Eigen::SparseMatrix<double>::InnerIterator it(graph.weights, outer); it; ++it)
      triplets.emplace_back(it.row(), it.col(), -it.value());
  for (int i = 0; i < n; ++i) triplets.emplace_back(i, i, degree[i]);
  Eigen::SparseMatrix<double> lap(n, n);
  lap.setFromTriplets(triplets.begin(), triplets.end());
  return lap;
}

bool is_connected(const Eigen::SparseMatrix<double>& weights) {
  const int n = static_cast<int>(weights.rows());
  if (n == 0) return true;
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    for (Eigen::SparseMatrix<double>::InnerIterator it(weights, i); it; ++it) {
      int j = static_cast<int>(it.row());
      if (!seen[j] && it.value() != 0.0) {
        seen[j] = 1;
        ++count;
        stack.push_back(j);
      }
    }
  }
  return count == n;
}

GraphSpectrum spectrum(const Eigen::SparseMatrix<double>& lap, int k, Normalization normalization) {
  const int n = static_cast<int>(lap.rows());
  if (k < 1 || k > n) throw std::invalid_argument("spectrum: need 1 <= k <= N");

  // off-diagonal pattern of the Laplacian doubles as the adjacency
  if (!is_connected(lap))
    throw ConnectivityError("graph is disconnected; increase the connectivity radius h");

  Eigen::MatrixXd dense(lap);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
  if (solver.info() != Eigen::Success)
    throw NumericalError("eigensolver failed on the graph Laplacian");

  GraphSpectrum out;
  out.eigenvalues = solver.eigenvalues().head(k);
  out.eigenvectors = solver.eigenvectors().leftCols(k);
  out.normalization = normalization;

  const double scale = normalization == Normalization::empirical_l2 ? std::sqrt(double(n)) : 1.0;
  for (int c = 0; c < k; ++c) {
    Eigen::VectorXd col = out.eigenvectors.col(c);
    col *= scale / col.norm();
    // sign convention: first entry with magnitude above 1e-10 is positive
    for (int r = 0; r < n; ++r) {
      if (std::abs(col[r]) > 1e-10) {
        if (col[r] < 0.0) col = -col;
        break;
      }
    }
    out.eigenvectors.col(c) = col;
  }
  return out;
}

double suggest_connectivity(const PointCloud& cloud, double c, HMode mode) {
  if (c <= 0.0) throw std::invalid_argument("suggest_connectivity: c must be positive");
  const double n = static_cast<double>(cloud.size());
  if (mode == HMode::experiment) return c * std::pow(n, -0.5);
  return c * std::pow(n, -1.0 / (2.0 * cloud.intrinsic_dim));
}

int detect_saturation(const std::vector<double>& eigenvalues, double threshold, int run) {
  const int k = static_cast<int>(eigenvalues.size());
  if (k < 3) throw std::invalid_argument("detect_saturation: need at least 3 eigenvalues");
  for (int i = 2; i + run <= k; ++i) {  // 1-based index i, eigenvalues[i-1]
    bool plateau = true;
    for (int j = 0; j < run; ++j) {
      double lo = eigenvalues[i - 1 + j];
      double hi = eigenvalues[i + j];
      if (lo <= 0.0 || (hi - lo) / lo >= threshold) {
        plateau = false;
        break;
      }
    }
    if (plateau) return i;
  }
  return k;
}

}  // namespace gbo
