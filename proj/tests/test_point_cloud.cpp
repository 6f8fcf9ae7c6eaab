#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "gbo/point_cloud.hpp"
#include "gbo/rng.hpp"

using namespace gbo;

TEST_SUITE_BEGIN("point_cloud");

TEST_CASE("validate enforces the basic invariants") {
  PointCloud cloud;
  cloud.points.resize(1, 2);
  cloud.intrinsic_dim = 1;
  CHECK_THROWS(validate(cloud));  // N < 2

  cloud.points.resize(3, 2);
  cloud.points.setZero();
  cloud.intrinsic_dim = 3;
  CHECK_THROWS(validate(cloud));  // m > d

  cloud.intrinsic_dim = 0;
  CHECK_THROWS(validate(cloud));

  cloud.intrinsic_dim = 2;
  CHECK_NOTHROW(validate(cloud));

  cloud.labels = {"a"};
  CHECK_THROWS(validate(cloud));  // label count mismatch
}

TEST_CASE("sample_circle points are unit norm and reproducible") {
  const auto a = sample_circle(200, 11);
  const auto b = sample_circle(200, 11);
  const auto c = sample_circle(200, 12);
  REQUIRE(a.size() == 200);
  CHECK(a.ambient_dim() == 2);
  CHECK(a.intrinsic_dim == 1);
  for (int i = 0; i < a.size(); ++i)
    CHECK(std::abs(a.points.row(i).norm() - 1.0) < 1e-12);
  CHECK((a.points - b.points).norm() == 0.0);
  CHECK((a.points - c.points).norm() > 0.0);
}

TEST_CASE("sample_circle angles are close to uniform") {
  const auto cloud = sample_circle(20000, 3);
  int right = 0;
  for (int i = 0; i < cloud.size(); ++i)
    if (cloud.points(i, 0) > 0) ++right;
  CHECK(std::abs(right / 20000.0 - 0.5) < 0.02);
}

TEST_CASE("sample_sphere points are unit norm with near-zero mean") {
  const auto cloud = sample_sphere(5000, 21);
  REQUIRE(cloud.size() == 5000);
  CHECK(cloud.ambient_dim() == 3);
  CHECK(cloud.intrinsic_dim == 2);
  for (int i = 0; i < cloud.size(); ++i)
    CHECK(std::abs(cloud.points.row(i).norm() - 1.0) < 1e-12);
  CHECK(cloud.points.colwise().mean().norm() < 0.05);
}

TEST_CASE("subsample_indices is a sorted distinct subset, seed stable") {
  const auto idx = subsample_indices(100, 30, 5);
  REQUIRE(idx.size() == 30);
  CHECK(std::is_sorted(idx.begin(), idx.end()));
  std::set<int> seen(idx.begin(), idx.end());
  CHECK(seen.size() == 30);
  CHECK(*seen.begin() >= 0);
  CHECK(*seen.rbegin() < 100);
  CHECK(idx == subsample_indices(100, 30, 5));
  CHECK(idx != subsample_indices(100, 30, 6));
}

TEST_CASE("subsample rows match subsample_indices rows") {
  const auto cloud = sample_sphere(80, 2);
  const auto idx = subsample_indices(80, 25, 9);
  const auto sub = subsample(cloud, 25, 9);
  REQUIRE(sub.size() == 25);
  for (int i = 0; i < 25; ++i)
    CHECK((sub.points.row(i) - cloud.points.row(idx[static_cast<std::size_t>(i)])).norm() == 0.0);
  CHECK(sub.intrinsic_dim == cloud.intrinsic_dim);
}

TEST_SUITE_END();
