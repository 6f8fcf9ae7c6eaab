#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "gbo/point_cloud.hpp"

namespace gbo {

// Epsilon-neighborhood graph with the indicator kernel: every edge shorter
// than h carries the same weight 2(m+2) / (N nu_m h^{m+2}).
struct WeightedGraph {
  Eigen::SparseMatrix<double> weights;  // N x N, symmetric, zero diagonal
  double h = 0.0;
  double coefficient = 0.0;
};

// Volume of the m-dimensional unit ball, pi^{m/2} / Gamma(m/2 + 1).
double unit_ball_volume(int m);

WeightedGraph build_weight_matrix(const PointCloud& cloud, double h);

// Unnormalized graph Laplacian D - W; symmetric positive semi-definite.
Eigen::SparseMatrix<double> laplacian(const WeightedGraph& graph);

enum class Normalization { euclidean_unit, empirical_l2 };

struct GraphSpectrum {
  Eigen::VectorXd eigenvalues;   // k smallest, ascending
  Eigen::MatrixXd eigenvectors;  // N x k, columns match eigenvalues
  Normalization normalization = Normalization::empirical_l2;

  int k() const { return static_cast<int>(eigenvalues.size()); }
  int n() const { return static_cast<int>(eigenvectors.rows()); }
};

// k smallest eigenpairs of the Laplacian. Dense solve; fine for N up to a few
// thousand. Throws ConnectivityError when the graph is disconnected.
GraphSpectrum spectrum(const Eigen::SparseMatrix<double>& lap, int k,
                       Normalization normalization = Normalization::empirical_l2);

bool is_connected(const Eigen::SparseMatrix<double>& weights);

// Connectivity radius heuristics: theory scaling c * N^{-1/(2m)} or the
// experiment convention c * N^{-1/2}.
enum class HMode { theory, experiment };
double suggest_connectivity(const PointCloud& cloud, double c, HMode mode);

// Smallest 1-based index i >= 2 whose forward relative increments
// (lambda_{i+1} - lambda_i) / lambda_i stay below `threshold` for `run`
// consecutive steps; the list length when no plateau exists. Intended as a
// truncation suggestion, always user-overridable.
int detect_saturation(const std::vector<double>& eigenvalues, double threshold = 0.02, int run = 3);

}  // namespace gbo
