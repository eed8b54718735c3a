#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "sgpkit/rng.hpp"

using sgp::Rng;

TEST_CASE("same seed reproduces the stream exactly") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.uniform01() == b.uniform01());
    CHECK(a.gaussian() == b.gaussian());
    CHECK(a.poisson(37.5) == b.poisson(37.5));
  }
}

TEST_CASE("different seeds diverge") {
  Rng a(1), b(2);
  int same = 0;
  for (int i = 0; i < 100; ++i)
    if (a.raw() == b.raw()) ++same;
  CHECK(same == 0);
}

TEST_CASE("uniform01 stays in [0,1), open_low in (0,1]") {
  Rng rng(7);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = rng.uniform01_open_low();
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("uniform(lo,hi) covers the interval") {
  Rng rng(9);
  double lo_seen = 1e30, hi_seen = -1e30;
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform(2.0, 5.0);
    CHECK(u >= 2.0);
    CHECK(u <= 5.0);
    lo_seen = std::min(lo_seen, u);
    hi_seen = std::max(hi_seen, u);
  }
  CHECK(lo_seen < 2.01);
  CHECK(hi_seen > 4.99);
}

TEST_CASE("gaussian moments") {
  Rng rng(123);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    REQUIRE(std::isfinite(g));
    sum += g;
    sumsq += g * g;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("poisson mean zero is identically zero") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) CHECK(rng.poisson(0.0) == 0);
}

TEST_CASE("poisson small-mean sample mean") {
  Rng rng(17);
  const double mean = 3.25;
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += static_cast<double>(rng.poisson(mean));
  // standard error ~ sqrt(mean/n) ~ 0.006; allow 5 sigma
  CHECK(std::abs(sum / n - mean) < 0.03);
}

TEST_CASE("poisson large mean goes through the chunked path") {
  Rng rng(29);
  const double mean = 1250.0;  // > 500, splits into chunks
  const int n = 20000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += static_cast<double>(rng.poisson(mean));
  // standard error ~ sqrt(mean/n) = 0.25; allow 5 sigma
  CHECK(std::abs(sum / n - mean) < 1.25);
}

TEST_CASE("below(n) is in range and hits every bucket") {
  Rng rng(31);
  std::vector<int> hits(10, 0);
  for (int i = 0; i < 10000; ++i) {
    const std::uint64_t k = rng.below(10);
    REQUIRE(k < 10);
    ++hits[static_cast<int>(k)];
  }
  for (int h : hits) CHECK(h > 800);
}
