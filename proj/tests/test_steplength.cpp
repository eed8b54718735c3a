#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "sgpkit/rng.hpp"
#include "sgpkit/steplength.hpp"

using sgp::AbbMin1Config;
using sgp::AbbMin1State;
using sgp::Mat;
using sgp::RitzSweep;
using sgp::StepBounds;
using sgp::SweepConfig;
using sgp::Vec;

namespace {

Vec random_vec(int n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  sgp::Rng rng(seed);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

// SPD matrix with prescribed eigenvalues via a random orthogonal basis.
Mat spd_with_spectrum(const Vec& xi, std::uint64_t seed) {
  const int n = static_cast<int>(xi.size());
  Mat base(n, n);
  sgp::Rng rng(seed);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) base(i, j) = rng.gaussian();
  const Mat q = Eigen::HouseholderQR<Mat>(base).householderQ();
  Mat a = q * xi.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

std::vector<unsigned char> no_mask(int n) {
  return std::vector<unsigned char>(n, 0);
}

// Projected matrix Q'AQ with Q from modified Gram-Schmidt on the columns.
Mat gram_schmidt_projection(const std::vector<Vec>& cols, const Mat& a) {
  const int m = static_cast<int>(cols.size());
  const int n = static_cast<int>(cols[0].size());
  Mat q(n, m);
  for (int j = 0; j < m; ++j) {
    Vec v = cols[j];
    for (int k = 0; k < j; ++k) v -= q.col(k).dot(v) * q.col(k);
    q.col(j) = v / v.norm();
  }
  return q.transpose() * a * q;
}

}  // namespace

TEST_CASE("steplength safeguard") {
  const StepBounds b;
  CHECK(sgp::clamp_steplength(0.5, b) == 0.5);
  CHECK(sgp::clamp_steplength(1e-20, b) == b.alpha_min);
  CHECK(sgp::clamp_steplength(1e20, b) == b.alpha_max);
  CHECK(sgp::clamp_steplength(0.0, b) == b.alpha_max);
  CHECK(sgp::clamp_steplength(-3.0, b) == b.alpha_max);
  CHECK(sgp::clamp_steplength(std::numeric_limits<double>::quiet_NaN(), b) ==
        b.alpha_max);
  CHECK(sgp::clamp_steplength(std::numeric_limits<double>::infinity(), b) ==
        b.alpha_max);
}

TEST_CASE("bb rule examples") {
  const StepBounds b;
  Vec s(2), z(2);
  s << 1, 0;
  z << 2, 0;
  const Vec ones = Vec::Ones(2);
  CHECK(sgp::bb1(s, z, ones, b) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(sgp::bb2(s, z, ones, b) == doctest::Approx(0.5).epsilon(1e-14));

  // equal difference vectors give unit steplength under the identity
  const Vec w = random_vec(5, 1);
  CHECK(sgp::bb1(w, w, Vec::Ones(5), b) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sgp::bb2(w, w, Vec::Ones(5), b) == doctest::Approx(1.0).epsilon(1e-14));

  // doubled diagonal: bb1 = (1/4) / (1 * (1/2) * 2) = 0.25
  const Vec twos = Vec::Constant(2, 2.0);
  CHECK(sgp::bb1(s, z, twos, b) == doctest::Approx(0.25).epsilon(1e-14));

  CHECK_THROWS_AS(sgp::bb1(s, Vec::Ones(3), twos, b), std::invalid_argument);
  CHECK_THROWS_AS(sgp::bb2(s, Vec::Ones(3), twos, b), std::invalid_argument);
}

TEST_CASE("identity scaling reduces to the standard bb rules") {
  const StepBounds b;
  for (int trial = 0; trial < 50; ++trial) {
    const Vec s = random_vec(8, 100 + trial);
    const Vec z = random_vec(8, 200 + trial);
    const Vec ones = Vec::Ones(8);
    const double raw1 = s.squaredNorm() / s.dot(z);
    const double raw2 = s.dot(z) / z.squaredNorm();
    CHECK(sgp::bb1(s, z, ones, b) ==
          doctest::Approx(sgp::clamp_steplength(raw1, b)).epsilon(1e-14));
    CHECK(sgp::bb2(s, z, ones, b) ==
          doctest::Approx(sgp::clamp_steplength(raw2, b)).epsilon(1e-14));
    // Cauchy-Schwarz: bb2 <= bb1 whenever the curvature estimate is positive
    if (s.dot(z) > 0.0)
      CHECK(sgp::bb2(s, z, ones, b) <= sgp::bb1(s, z, ones, b) + 1e-14);
  }
}

TEST_CASE("bb safeguards on degenerate input") {
  const StepBounds b;
  Vec s(2), z(2);
  s << 1, 0;
  z << -2, 0;  // negative curvature: raw bb values non-positive
  const Vec ones = Vec::Ones(2);
  CHECK(sgp::bb1(s, z, ones, b) == b.alpha_max);
  CHECK(sgp::bb2(s, z, ones, b) == b.alpha_max);

  z << 0, 0;  // zero denominator
  CHECK(sgp::bb1(s, z, ones, b) == b.alpha_max);
  CHECK(sgp::bb2(s, z, ones, b) == b.alpha_max);

  // tiny curvature clamps at the cap rather than exploding
  z << 1e-30, 0;
  CHECK(sgp::bb1(s, z, ones, b) == b.alpha_max);
}

TEST_CASE("abbmin1 warmup forces bb2") {
  AbbMin1Config cfg;
  cfg.warmup = 2;
  AbbMin1State state(cfg);
  const StepBounds b;
  const Vec ones = Vec::Ones(2);
  Vec s(2), z(2);
  s << 1, 0;
  z << 1, 3;  // bb1 = 1, bb2 = 0.1: the ratio branch would fire if consulted
  CHECK(state.select(s, z, ones) ==
        doctest::Approx(sgp::bb2(s, z, ones, b)).epsilon(1e-14));
  CHECK(state.select(s, z, ones) ==
        doctest::Approx(sgp::bb2(s, z, ones, b)).epsilon(1e-14));
}

TEST_CASE("abbmin1 adaptive branches") {
  AbbMin1Config cfg;
  cfg.warmup = 0;
  AbbMin1State state(cfg);
  const Vec ones = Vec::Ones(2);
  Vec s(2), z(2);

  // ratio 0.1 < tau0 = 0.5: take the min of the bb2 history (only 0.1 so far)
  s << 1, 0;
  z << 1, 3;
  CHECK(state.select(s, z, ones) == doctest::Approx(0.1).epsilon(1e-12));

  // s = z: ratio 1 >= tau, bb1 branch returns 1
  s << 2, 0;
  z << 2, 0;
  CHECK(state.select(s, z, ones) == doctest::Approx(1.0).epsilon(1e-12));

  // ratio ~0.308 below the updated tau: min over history {0.1, 1, 0.385}
  s << 1, 0;
  z << 0.8, 1.2;
  CHECK(state.select(s, z, ones) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("abbmin1 history window is bounded") {
  AbbMin1Config cfg;
  cfg.warmup = 0;
  cfg.history = 2;
  AbbMin1State state(cfg);
  const Vec ones = Vec::Ones(2);
  Vec s(2), z(2);
  s << 1, 0;
  z << 1, 3;                    // bb2 = 0.1
  state.select(s, z, ones);     // history {0.1}
  z << 1, 1;                    // bb2 = 1/2 = 0.5
  state.select(s, z, ones);     // history {0.1, 0.5}
  z << 0.9, 1.8;                // bb2 = 0.9/(0.81+3.24) ~ 0.2222
  // history evicts 0.1 -> {0.5, 0.2222...}; ratio fires the min branch
  const double got = state.select(s, z, ones);
  CHECK(got == doctest::Approx(0.9 / 4.05).epsilon(1e-12));
}

TEST_CASE("make_column masks and scales") {
  RitzSweep sweep;
  const int n = 5;
  const Vec g = random_vec(n, 3);
  Vec d(n);
  d << 1.0, 4.0, 0.25, 9.0, 1.0;

  const Vec all_free = sweep.make_column(g, d, no_mask(n));
  for (int i = 0; i < n; ++i)
    CHECK(all_free[i] == doctest::Approx(std::sqrt(d[i]) * g[i]).epsilon(1e-15));

  std::vector<unsigned char> all_active(n, 1);
  CHECK(sweep.make_column(g, d, all_active).lpNorm<Eigen::Infinity>() == 0.0);

  std::vector<unsigned char> partial(n, 0);
  partial[1] = partial[3] = 1;
  const Vec masked = sweep.make_column(g, d, partial);
  CHECK(masked[1] == 0.0);
  CHECK(masked[3] == 0.0);
  CHECK(masked[0] == all_free[0]);
  CHECK(masked[2] == all_free[2]);
  CHECK(masked[4] == all_free[4]);

  CHECK_THROWS_AS(sweep.make_column(g, Vec::Ones(3), no_mask(3)),
                  std::invalid_argument);
}

TEST_CASE("empty sweep falls back to the bootstrap steplength") {
  SweepConfig cfg;
  cfg.alpha0 = 0.7;
  RitzSweep sweep(cfg);
  const Vec gbar = random_vec(4, 4);
  CHECK(sweep.next_alpha(gbar) == 0.7);
  CHECK(sweep.next_alpha(gbar) == 0.7);
  CHECK(sweep.factorizations() == 0);
}

TEST_CASE("single-column sweep returns the Rayleigh steplength") {
  const int n = 6;
  const Vec xi = random_vec(n, 5, 0.5, 8.0);
  const Mat a = spd_with_spectrum(xi, 6);
  SweepConfig cfg;
  cfg.m = 1;
  RitzSweep sweep(cfg);

  Vec x = random_vec(n, 7);
  Vec g = a * x;
  const double alpha = 0.05;
  const Vec ones = Vec::Ones(n);

  sweep.push(sweep.make_column(g, ones, no_mask(n)), alpha);
  x -= alpha * g;
  const Vec g1 = a * x;

  const double rayleigh = g.dot(a * g) / g.squaredNorm();
  const Vec gbar = sweep.make_column(g1, ones, no_mask(n));
  const std::vector<double> eigs = sweep.ritz_values(gbar);
  REQUIRE(eigs.size() == 1);
  CHECK(eigs[0] == doctest::Approx(rayleigh).epsilon(1e-10));

  RitzSweep again(cfg);
  again.push(again.make_column(g, ones, no_mask(n)), alpha);
  CHECK(again.next_alpha(gbar) ==
        doctest::Approx(1.0 / rayleigh).epsilon(1e-10));
}

TEST_CASE("full-memory sweep on a 2x2 diagonal recovers the spectrum") {
  Mat a = Mat::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  SweepConfig cfg;
  cfg.m = 2;
  RitzSweep sweep(cfg);
  const Vec ones = Vec::Ones(2);

  Vec x(2);
  x << 1, 1;
  Vec g = a * x;
  for (double alpha : {0.3, 0.25}) {
    sweep.push(sweep.make_column(g, ones, no_mask(2)), alpha);
    x -= alpha * g;
    g = a * x;
  }
  const std::vector<double> eigs =
      sweep.ritz_values(sweep.make_column(g, ones, no_mask(2)));
  REQUIRE(eigs.size() == 2);
  CHECK(eigs[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(eigs[1] == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("projected matrix matches an explicit Gram-Schmidt oracle") {
  const int n = 10, m = 3;
  for (int trial = 0; trial < 5; ++trial) {
    const Vec xi = random_vec(n, 40 + trial, 1.0, 10.0);
    const Mat a = spd_with_spectrum(xi, 50 + trial);
    SweepConfig cfg;
    cfg.m = m;
    RitzSweep sweep(cfg);
    const Vec ones = Vec::Ones(n);

    Vec x = random_vec(n, 60 + trial);
    Vec g = a * x;
    std::vector<Vec> raw_cols;
    for (int k = 0; k < m; ++k) {
      const double alpha = g.squaredNorm() / g.dot(a * g);  // exact descent
      raw_cols.push_back(g);
      sweep.push(sweep.make_column(g, ones, no_mask(n)), alpha);
      x -= alpha * g;
      g = a * x;
    }
    Mat phi, phi_sym;
    const std::vector<double> eigs =
        sweep.ritz_values(sweep.make_column(g, ones, no_mask(n)), &phi,
                          &phi_sym);
    REQUIRE(static_cast<int>(eigs.size()) == m);

    const Mat oracle = gram_schmidt_projection(raw_cols, a);
    CHECK((phi - oracle).lpNorm<Eigen::Infinity>() <= 1e-8);

    // symmetrization keeps the diagonal and mirrors the lower triangle
    for (int i = 0; i < m; ++i) {
      CHECK(phi_sym(i, i) == phi(i, i));
      for (int j = 0; j < i; ++j) {
        CHECK(phi_sym(i, j) == phi(i, j));
        CHECK(phi_sym(j, i) == phi(i, j));
      }
    }

    // Ritz values interlace the spectrum
    for (double ev : eigs) {
      CHECK(ev >= xi.minCoeff() - 1e-10);
      CHECK(ev <= xi.maxCoeff() + 1e-10);
    }
  }
}

TEST_CASE("queued steplengths come out in increasing order") {
  const int n = 8, m = 3;
  const Vec xi = random_vec(n, 70, 0.5, 8.0);
  const Mat a = spd_with_spectrum(xi, 71);
  SweepConfig cfg;
  cfg.m = m;
  RitzSweep sweep(cfg);
  const Vec ones = Vec::Ones(n);

  Vec x = random_vec(n, 72);
  Vec g = a * x;
  for (int k = 0; k < m; ++k) {
    const Vec col = sweep.make_column(g, ones, no_mask(n));
    const double alpha = sweep.next_alpha(col);  // bootstrap fallback
    sweep.push(col, alpha);
    x -= alpha * g;
    g = a * x;
  }
  CHECK(sweep.factorizations() == 0);

  double prev = 0.0;
  for (int k = 0; k < m; ++k) {
    const Vec col = sweep.make_column(g, ones, no_mask(n));
    const double alpha = sweep.next_alpha(col);
    CHECK(alpha >= prev);
    CHECK(alpha >= cfg.bounds.alpha_min);
    CHECK(alpha <= cfg.bounds.alpha_max);
    prev = alpha;
    sweep.push(col, alpha);
    x -= alpha * g;
    g = a * x;
  }
  CHECK(sweep.factorizations() == 1);
  CHECK(sweep.queued() == 0);
}

TEST_CASE("negative projected curvature is discarded") {
  SweepConfig cfg;
  cfg.m = 1;
  cfg.alpha0 = 0.9;
  RitzSweep sweep(cfg);
  Vec c0(2), gbar(2);
  c0 << 1, 0;
  gbar << 2, 0;  // projected value 1 - 2 = -1 at unit steplength
  sweep.push(c0, 1.0);

  const std::vector<double> eigs = sweep.ritz_values(gbar);
  REQUIRE(eigs.size() == 1);
  CHECK(eigs[0] == doctest::Approx(-1.0).epsilon(1e-12));

  // the negative value never reaches the queue; fallback is used instead
  CHECK(sweep.next_alpha(gbar) == 0.9);
}

TEST_CASE("rank-deficient columns are dropped oldest-first") {
  SweepConfig cfg;
  cfg.m = 2;
  RitzSweep sweep(cfg);
  Vec zero = Vec::Zero(2);
  Vec c1(2), gbar(2);
  c1 << 1, 0;
  gbar << 0.8, 0;
  sweep.push(zero, 1.0);
  sweep.push(c1, 0.5);

  // the degenerate oldest column forces a retry on the newest one alone:
  // value (1/0.5) * (1 - 0.8) = 0.4
  const std::vector<double> eigs = sweep.ritz_values(gbar);
  REQUIRE(eigs.size() == 1);
  CHECK(eigs[0] == doctest::Approx(0.4).epsilon(1e-12));

  RitzSweep degenerate(cfg);
  degenerate.push(zero, 1.0);
  degenerate.push(zero, 1.0);
  CHECK(degenerate.ritz_values(gbar).empty());
  CHECK(degenerate.next_alpha(gbar) == 1.0);  // fallback
}

TEST_CASE("sweep product accounting") {
  const int n = 12;
  for (int m : {3, 4, 5}) {
    const Vec xi = random_vec(n, 80 + m, 0.5, 6.0);
    const Mat a = spd_with_spectrum(xi, 90 + m);
    SweepConfig cfg;
    cfg.m = m;
    RitzSweep sweep(cfg);
    const Vec ones = Vec::Ones(n);

    Vec x = random_vec(n, 95 + m);
    Vec g = a * x;
    // bootstrap: m columns at the fallback steplength
    for (int k = 0; k < m; ++k) {
      const Vec col = sweep.make_column(g, ones, no_mask(n));
      const double alpha = sweep.next_alpha(col);
      sweep.push(col, alpha);
      x -= alpha * g;
      g = a * x;
    }
    const long long expected = static_cast<long long>(m + 3) * m / 2;

    // three full sweeps, each costing (m+3)m/2 sweep products
    for (int sweep_idx = 0; sweep_idx < 3; ++sweep_idx) {
      const long long before = sweep.sweep_products();
      const long long rhs_before = sweep.rhs_products();
      const int fact_before = sweep.factorizations();
      for (int k = 0; k < m; ++k) {
        const Vec col = sweep.make_column(g, ones, no_mask(n));
        const double alpha = sweep.next_alpha(col);
        sweep.push(col, alpha);
        x -= alpha * g;
        g = a * x;
      }
      CHECK(sweep.sweep_products() - before == expected);
      CHECK(sweep.rhs_products() - rhs_before == m);
      CHECK(sweep.factorizations() - fact_before == 1);
    }
    CHECK(sweep.factorizations() == 3);
  }
}

TEST_CASE("sweep configuration is validated") {
  SweepConfig cfg;
  cfg.m = 0;
  CHECK_THROWS_AS(RitzSweep{cfg}, std::invalid_argument);
  RitzSweep sweep;
  CHECK_THROWS_AS(sweep.push(Vec::Ones(2), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(sweep.push(Vec::Ones(2), -1.0), std::invalid_argument);
}
