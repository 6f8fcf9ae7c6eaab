#include "gbo/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "gbo/io.hpp"
#include "gbo/rng.hpp"

namespace gbo {

void validate(const PointCloud& cloud) {
  if (cloud.size() < 2) throw std::invalid_argument("point cloud needs at least 2 points");
  if (cloud.ambient_dim() < 1) throw std::invalid_argument("point cloud needs ambient dimension >= 1");
  if (cloud.intrinsic_dim < 1 || cloud.intrinsic_dim > cloud.ambient_dim())
    throw std::invalid_argument("intrinsic dimension must satisfy 1 <= m <= d");
  if (!cloud.labels.empty() && static_cast<int>(cloud.labels.size()) != cloud.size())
    throw std::invalid_argument("label count must match point count");
}

PointCloud load_point_cloud(const std::string& path, int intrinsic_dim) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open point cloud file: " + path);

  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    for (char& c : line)
      if (c == ',' || c == '\t') c = ' ';
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!ls.eof()) {
      std::string rest;
      ls.clear();
      ls >> rest;
      if (!rest.empty())
        throw std::invalid_argument("row " + std::to_string(lineno) + ": cannot parse '" + rest + "'");
    }
    if (row.empty()) continue;  // blank line
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::invalid_argument("row " + std::to_string(lineno) + ": has " +
                                  std::to_string(row.size()) + " values, expected " +
                                  std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) throw std::invalid_argument("point cloud file has fewer than 2 points: " + path);

  PointCloud cloud;
  cloud.points.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows.front().size(); ++j) cloud.points(i, j) = rows[i][j];
  cloud.intrinsic_dim = intrinsic_dim;
  validate(cloud);
  return cloud;
}

void save_point_cloud(const PointCloud& cloud, const std::string& path) {
  std::string out;
  for (int i = 0; i < cloud.size(); ++i) {
    for (int j = 0; j < cloud.ambient_dim(); ++j) {
      if (j) out += ' ';
      out += format_double(cloud.points(i, j));
    }
    out += '\n';
  }
  write_text_atomic(path, out);
}

PointCloud sample_circle(int n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("sample_circle: n must be >= 2");
  Rng rng(seed);
  PointCloud cloud;
  cloud.points.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    double theta = -std::numbers::pi + 2.0 * std::numbers::pi * rng.uniform01();
    cloud.points(i, 0) = std::cos(theta);
    cloud.points(i, 1) = std::sin(theta);
  }
  cloud.intrinsic_dim = 1;
  return cloud;
}

PointCloud sample_sphere(int n, std::uint64_t seed) {
  if (n < 4) throw std::invalid_argument("sample_sphere: n must be >= 4");
  Rng rng(seed);
  PointCloud cloud;
  cloud.points.resize(n, 3);
  for (int i = 0; i < n; ++i) {
    double x, y, z, norm;
    do {
      x = rng.normal();
      y = rng.normal();
      z = rng.normal();
      norm = std::sqrt(x * x + y * y + z * z);
    } while (norm < 1e-12);
    cloud.points(i, 0) = x / norm;
    cloud.points(i, 1) = y / norm;
    cloud.points(i, 2) = z / norm;
  }
  cloud.intrinsic_dim = 2;
  return cloud;
}

std::vector<int> subsample_indices(int total, int n, std::uint64_t seed) {
  if (n < 2 || n > total) throw std::invalid_argument("subsample: n out of range");
  Rng rng(seed);
  std::vector<int> idx = rng.sample_without_replacement(total, n);
  std::sort(idx.begin(), idx.end());
  return idx;
}

PointCloud subsample(const PointCloud& cloud, int n, std::uint64_t seed) {
  validate(cloud);
  std::vector<int> idx = subsample_indices(cloud.size(), n, seed);
  PointCloud out;
  out.points.resize(n, cloud.ambient_dim());
  out.labels.reserve(n);
  for (int i = 0; i < n; ++i) {
    out.points.row(i) = cloud.points.row(idx[i]);
    out.labels.push_back(cloud.labels.empty() ? std::to_string(idx[i]) : cloud.labels[idx[i]]);
  }
  out.intrinsic_dim = cloud.intrinsic_dim;
  return out;
}

}  // namespace gbo
