#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace gbo {

// A finite sample of a hidden manifold; the optimization search space.
struct PointCloud {
  Eigen::MatrixXd points;            // N x d, one point per row
  int intrinsic_dim = 1;             // m, declared by the user, never estimated
  std::vector<std::string> labels;   // optional, empty or one per point

  int size() const { return static_cast<int>(points.rows()); }
  int ambient_dim() const { return static_cast<int>(points.cols()); }
};

// Throws std::invalid_argument when the invariants (N >= 2, 1 <= m <= d,
// label count) are violated.
void validate(const PointCloud& cloud);

// One point per row, whitespace- or comma-separated reals, ambient dimension
// inferred from the first row.
PointCloud load_point_cloud(const std::string& path, int intrinsic_dim);
void save_point_cloud(const PointCloud& cloud, const std::string& path);

// n i.i.d. uniform points on the unit circle in R^2 (m = 1).
PointCloud sample_circle(int n, std::uint64_t seed);

// n i.i.d. uniform points on the unit sphere in R^3 via normalized isotropic
// Gaussians (m = 2).
PointCloud sample_sphere(int n, std::uint64_t seed);

// Uniform n-subset without replacement, indices sorted ascending. Labels of
// the result record the originating row when the input had none.
PointCloud subsample(const PointCloud& cloud, int n, std::uint64_t seed);
std::vector<int> subsample_indices(int total, int n, std::uint64_t seed);

}  // namespace gbo
