#include "nlproj/core.hpp"

#include <doctest.h>

#include <cmath>

using namespace nlproj;

TEST_CASE("rng is deterministic per seed and differs across seeds") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const double va = a.uniform();
    CHECK(va == b.uniform());
    CHECK(va >= 0.0);
    CHECK(va < 1.0);
  }
  bool any_diff = false;
  Rng a2(42);
  for (int i = 0; i < 10; ++i) any_diff = any_diff || a2.uniform() != c.uniform();
  CHECK(any_diff);
}

TEST_CASE("uniform(lo, hi) stays inside the interval") {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform(-3.0, 5.0);
    CHECK(v >= -3.0);
    CHECK(v < 5.0);
  }
}

TEST_CASE("uniform_index covers the range without escaping it") {
  Rng rng(11);
  bool seen[5] = {false, false, false, false, false};
  for (int i = 0; i < 500; ++i) {
    const auto k = rng.uniform_index(5);
    REQUIRE(k < 5);
    seen[k] = true;
  }
  for (bool s : seen) CHECK(s);
}

TEST_CASE("normal draws have roughly standard moments") {
  Rng rng(3);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double v = rng.normal();
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.03);
  CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("vector and matrix fills are reproducible") {
  Rng a(5), b(5);
  const Vec va = a.normal_vec(8);
  const Vec vb = b.normal_vec(8);
  CHECK((va - vb).lpNorm<Eigen::Infinity>() == 0.0);
  const Mat ma = a.normal_mat(3, 4);
  const Mat mb = b.normal_mat(3, 4);
  CHECK((ma - mb).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("derive_seed separates streams") {
  const auto s0 = derive_seed(9, 0);
  const auto s1 = derive_seed(9, 1);
  const auto t0 = derive_seed(10, 0);
  CHECK(s0 != s1);
  CHECK(s0 != t0);
  CHECK(derive_seed(9, 0) == s0);
}

TEST_CASE("require and require_finite throw on violation") {
  CHECK_THROWS_AS(require(false, "boom"), DimensionError);
  CHECK_NOTHROW(require(true, "fine"));
  Vec v(2);
  v << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(require_finite(v, "v"), NonFiniteError);
  v[1] = kInf;
  CHECK_THROWS_AS(require_finite(v, "v"), NonFiniteError);
  v[1] = 2.0;
  CHECK_NOTHROW(require_finite(v, "v"));
}
