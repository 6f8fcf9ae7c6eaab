#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "gbo/rng.hpp"

using namespace gbo;

TEST_SUITE_BEGIN("rng");

TEST_CASE("derive_seed is deterministic and separates tags and indices") {
  const auto a = derive_seed(42, "method", 0);
  CHECK(a == derive_seed(42, "method", 0));
  CHECK(a != derive_seed(42, "method", 1));
  CHECK(a != derive_seed(42, "other", 0));
  CHECK(a != derive_seed(43, "method", 0));
  // tag boundary matters: ("ab", 1) vs ("a", ...) must not collide by design
  CHECK(derive_seed(7, "ab", 1) != derive_seed(7, "a", 1));
}

TEST_CASE("uniform01 stays in [0,1) and reproduces per seed") {
  Rng a(123), b(123), c(124);
  bool same = true, diff = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = a.uniform01();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    same = same && (x == b.uniform01());
    diff = diff || (x != c.uniform01());
  }
  CHECK(same);
  CHECK(diff);
}

TEST_CASE("normal deviates have roughly standard moments") {
  Rng rng(7);
  const int n = 200000;
  double sum = 0, sumsq = 0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("uniform_int covers the range uniformly enough") {
  Rng rng(99);
  std::vector<int> counts(10, 0);
  for (int i = 0; i < 100000; ++i) {
    const int v = rng.uniform_int(10);
    REQUIRE(v >= 0);
    REQUIRE(v < 10);
    ++counts[v];
  }
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}

TEST_CASE("sample_without_replacement yields distinct in-range values") {
  Rng rng(5);
  const auto picks = rng.sample_without_replacement(50, 20);
  REQUIRE(picks.size() == 20);
  std::set<int> seen(picks.begin(), picks.end());
  CHECK(seen.size() == 20);
  CHECK(*seen.begin() >= 0);
  CHECK(*seen.rbegin() < 50);

  // exhaustive draw is a permutation
  Rng rng2(6);
  auto all = rng2.sample_without_replacement(10, 10);
  std::sort(all.begin(), all.end());
  for (int i = 0; i < 10; ++i) CHECK(all[i] == i);
}

TEST_CASE("sample_without_replacement is unbiased over subsets") {
  // P(element 0 included in a 3-of-10 draw) = 3/10
  int hits = 0;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(1000, "swr", t));
    const auto picks = rng.sample_without_replacement(10, 3);
    if (std::find(picks.begin(), picks.end(), 0) != picks.end()) ++hits;
  }
  const double p = double(hits) / trials;
  CHECK(std::abs(p - 0.3) < 0.02);
}

TEST_SUITE_END();
