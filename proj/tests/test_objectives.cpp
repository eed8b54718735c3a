#include <cmath>
#include <memory>
#include <stdexcept>

#include "doctest.h"
#include "sgpkit/kernels.hpp"
#include "sgpkit/objectives.hpp"
#include "sgpkit/psf.hpp"
#include "sgpkit/rng.hpp"

using sgp::BlurOperator;
using sgp::CompositeObjective;
using sgp::HsRegularizer;
using sgp::ImageShape;
using sgp::KlObjective;
using sgp::LeastSquaresObjective;
using sgp::LineModel;
using sgp::Mat;
using sgp::Objective;
using sgp::QuadraticObjective;
using sgp::RofDualObjective;
using sgp::Vec;

namespace {

Vec random_vec(int n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  sgp::Rng rng(seed);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

std::shared_ptr<const BlurOperator> delta_op(ImageShape s) {
  Vec k = Vec::Zero(s.size());
  k[s.at((s.h - 1) / 2, (s.w - 1) / 2)] = 1.0;
  return std::make_shared<BlurOperator>(k, s);
}

std::shared_ptr<const BlurOperator> gauss_op(ImageShape s, double sigma) {
  return std::make_shared<BlurOperator>(sgp::gaussian_psf(s, sigma), s);
}

Vec fd_grad(const Objective& obj, const Vec& x) {
  Vec g(x.size());
  Vec probe = x;
  for (int i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + h;
    const double fp = obj.value(probe);
    probe[i] = x[i] - h;
    const double fm = obj.value(probe);
    probe[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

void check_fd(const Objective& obj, const Vec& x) {
  const Vec g = obj.gradient(x);
  const Vec fd = fd_grad(obj, x);
  const double scale = 1.0 + g.lpNorm<Eigen::Infinity>();
  CHECK((g - fd).lpNorm<Eigen::Infinity>() <= 1e-5 * scale);
}

void check_split(const Objective& obj, const Vec& x) {
  Vec u, v;
  obj.uv_split(x, u, v);
  const Vec g = obj.gradient(x);
  const double scale = 1.0 + g.lpNorm<Eigen::Infinity>();
  CHECK((u - v + g).lpNorm<Eigen::Infinity>() <= 1e-10 * scale);
  CHECK(u.minCoeff() >= 0.0);
  CHECK(v.minCoeff() > 0.0);
}

}  // namespace

TEST_CASE("least squares examples") {
  const ImageShape s{4, 4};
  const auto op = gauss_op(s, 1.3);
  const Vec x = random_vec(s.size(), 1, 0.5, 2.0);
  const Vec b = Vec::Constant(s.size(), 0.1);
  const Vec y = op->apply(x) + b;  // exact fit
  LeastSquaresObjective fit(op, y, b);
  CHECK(fit.value(x) <= 1e-20);
  CHECK(fit.gradient(x).lpNorm<Eigen::Infinity>() <= 1e-10);

  // identity operator, zero data: value is half the squared norm
  const auto ident = delta_op(s);
  LeastSquaresObjective plain(ident, Vec::Zero(s.size()), Vec::Zero(s.size()));
  const Vec z = random_vec(s.size(), 2);
  CHECK(plain.value(z) == doctest::Approx(0.5 * z.squaredNorm()).epsilon(1e-12));
  CHECK((plain.gradient(z) - z).lpNorm<Eigen::Infinity>() <= 1e-10);

  // fused evaluation agrees with the split one
  Vec g;
  const double f = plain.value_grad(z, g);
  CHECK(f == doctest::Approx(plain.value(z)).epsilon(1e-14));
  CHECK((g - plain.gradient(z)).lpNorm<Eigen::Infinity>() <= 1e-14);
}

TEST_CASE("least squares gradient and splitting on random points") {
  const ImageShape s{8, 8};
  const auto op = gauss_op(s, 1.3);
  const Vec y = random_vec(s.size(), 3, 0.5, 2.0);
  const Vec b = Vec::Constant(s.size(), 0.05);
  LeastSquaresObjective obj(op, y, b);
  for (int t = 0; t < 20; ++t) {
    const Vec x = random_vec(s.size(), 100 + t, 0.1, 3.0);
    check_fd(obj, x);
    check_split(obj, x);
    CHECK(obj.value(x) >= 0.0);
  }

  // identity operator: U = y, V = Ax + b = x + b
  LeastSquaresObjective ident(delta_op(s), y, b);
  const Vec x = random_vec(s.size(), 4, 0.5, 2.0);
  Vec u, v;
  ident.uv_split(x, u, v);
  CHECK((u - y).lpNorm<Eigen::Infinity>() <= 1e-10);
  CHECK((v - (x + b)).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("kl scalar example and conventions") {
  const ImageShape s{1, 1};
  const auto one = delta_op(s);

  KlObjective scalar(one, Vec::Constant(1, 2.0), Vec::Zero(1));
  CHECK(scalar.value(Vec::Constant(1, 1.0)) ==
        doctest::Approx(2.0 * std::log(2.0) - 1.0).epsilon(1e-14));

  // zero count against unit model contributes exactly the model value
  KlObjective zero_count(one, Vec::Zero(1), Vec::Zero(1));
  CHECK(zero_count.value(Vec::Constant(1, 1.0)) ==
        doctest::Approx(1.0).epsilon(1e-14));

  // non-positive model is a domain error
  CHECK_THROWS_AS(scalar.value(Vec::Zero(1)), std::domain_error);
  CHECK_THROWS_WITH(scalar.value(Vec::Zero(1)), "KL domain violation");
}

TEST_CASE("kl gradient, splitting, and the Gibbs equality") {
  const ImageShape s{8, 8};
  const auto op = gauss_op(s, 1.3);
  const Vec truth = random_vec(s.size(), 5, 0.5, 2.0);
  const Vec b = Vec::Constant(s.size(), 0.1);
  const Vec y = op->apply(truth) + b;
  KlObjective obj(op, y, b);

  // exact fit: value 0, gradient 0
  CHECK(obj.value(truth) <= 1e-12);
  CHECK(obj.gradient(truth).lpNorm<Eigen::Infinity>() <= 1e-8);

  for (int t = 0; t < 20; ++t) {
    const Vec x = random_vec(s.size(), 300 + t, 0.2, 3.0);
    check_fd(obj, x);
    check_split(obj, x);
    CHECK(obj.value(x) >= 0.0);
    if ((op->apply(x) + b - y).lpNorm<Eigen::Infinity>() > 1e-6)
      CHECK(obj.value(x) > 0.0);
  }

  // normalized kernel has unit column sums, so V = A'1 = 1
  Vec u, v;
  obj.uv_split(truth, u, v);
  CHECK((v - Vec::Ones(s.size())).lpNorm<Eigen::Infinity>() <= 1e-10);
  CHECK((obj.adjoint_of_ones() - Vec::Ones(s.size()))
            .lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("hypersurface regularizer examples") {
  const ImageShape s{6, 6};
  const double delta = 0.1;
  HsRegularizer reg(s, delta);

  const double c = 0.7;
  const Vec flat = Vec::Constant(s.size(), c);
  CHECK(reg.value(flat) == doctest::Approx(s.size() * delta).epsilon(1e-12));
  CHECK(reg.gradient(flat).lpNorm<Eigen::Infinity>() <= 1e-12);

  Vec u, v;
  reg.uv_split(flat, u, v);
  for (int i = 0; i < s.size(); ++i) {
    CHECK(u[i] == doctest::Approx(4.0 * c / delta).epsilon(1e-12));
    CHECK(v[i] == doctest::Approx(4.0 * c / delta).epsilon(1e-12));
  }

  for (int t = 0; t < 20; ++t) {
    const Vec x = random_vec(s.size(), 500 + t, 0.2, 3.0);
    check_fd(reg, x);
    check_split(reg, x);
  }
}

TEST_CASE("composite objective combines data and regularizer") {
  const ImageShape s{8, 8};
  const auto op = gauss_op(s, 1.3);
  const Vec truth = random_vec(s.size(), 7, 0.5, 2.0);
  const Vec b = Vec::Constant(s.size(), 0.1);
  const Vec y = op->apply(truth) + b;
  const double beta = 0.05;
  const auto data = std::make_shared<KlObjective>(op, y, b);
  const auto reg = std::make_shared<HsRegularizer>(s, 0.1);
  CompositeObjective obj(data, reg, beta);

  const Vec x = random_vec(s.size(), 8, 0.3, 2.5);
  CHECK(obj.value(x) ==
        doctest::Approx(data->value(x) + beta * reg->value(x)).epsilon(1e-12));
  Vec g;
  const double f = obj.value_grad(x, g);
  CHECK(f == doctest::Approx(obj.value(x)).epsilon(1e-14));
  CHECK((g - obj.gradient(x)).lpNorm<Eigen::Infinity>() <= 1e-14);

  for (int t = 0; t < 20; ++t) {
    const Vec p = random_vec(s.size(), 700 + t, 0.2, 3.0);
    check_fd(obj, p);
    check_split(obj, p);
  }
}

TEST_CASE("quadratic objective gradient and line model") {
  const int n = 12;
  Mat base(n, n);
  for (int i = 0; i < n; ++i) {
    const Vec row = random_vec(n, 900 + i);
    base.row(i) = row.transpose();
  }
  const Mat a = base.transpose() * base + Mat::Identity(n, n);
  const Vec y = random_vec(n, 9);
  QuadraticObjective obj(a, y);

  for (int t = 0; t < 20; ++t) check_fd(obj, random_vec(n, 1000 + t));

  const Vec x = random_vec(n, 10);
  const Vec d = random_vec(n, 11);
  const Vec g = obj.gradient(x);
  LineModel model;
  REQUIRE(obj.line_model(x, d, g, model));
  CHECK(model.slope == doctest::Approx(g.dot(d)).epsilon(1e-12));
  CHECK(model.curvature == doctest::Approx(d.dot(a * d)).epsilon(1e-12));
  const double f0 = obj.value(x);
  for (double t : {0.1, 0.5, 1.0}) {
    const double direct = obj.value(x + t * d) - f0;
    CHECK(std::abs(direct - model.delta(t)) <= 1e-10 * (1.0 + std::abs(f0)));
  }
}

TEST_CASE("least squares line model is exact") {
  const ImageShape s{8, 8};
  const auto op = gauss_op(s, 1.3);
  const Vec y = random_vec(s.size(), 12, 0.5, 2.0);
  LeastSquaresObjective obj(op, y, Vec::Zero(s.size()));
  const Vec x = random_vec(s.size(), 13, 0.1, 2.0);
  const Vec d = random_vec(s.size(), 14);
  const Vec g = obj.gradient(x);
  LineModel model;
  REQUIRE(obj.line_model(x, d, g, model));
  CHECK(model.slope == doctest::Approx(g.dot(d)).epsilon(1e-12));
  CHECK(model.curvature ==
        doctest::Approx(op->apply(d).squaredNorm()).epsilon(1e-10));
  const double f0 = obj.value(x);
  for (double t : {0.25, 1.0}) {
    const double direct = obj.value(x + t * d) - f0;
    CHECK(std::abs(direct - model.delta(t)) <= 1e-10 * (1.0 + std::abs(f0)));
  }

  // objectives without a closed ray restriction decline
  KlObjective kl(op, y.cwiseAbs(), Vec::Constant(s.size(), 0.1));
  CHECK_FALSE(kl.line_model(x, d, g, model));
}

TEST_CASE("rof dual objective") {
  const ImageShape s{8, 8};
  const int n = s.size();
  const double beta = 3.0;
  const Vec y = random_vec(n, 15, -1.0, 2.0);
  RofDualObjective obj(y, beta, s);

  CHECK(obj.value(Vec::Zero(2 * n)) ==
        doctest::Approx(y.squaredNorm()).epsilon(1e-12));

  RofDualObjective zero(Vec::Zero(n), beta, s);
  CHECK(zero.value(Vec::Zero(2 * n)) == 0.0);
  CHECK(zero.gradient(Vec::Zero(2 * n)).lpNorm<Eigen::Infinity>() == 0.0);

  for (int t = 0; t < 5; ++t) {
    const Vec p = random_vec(2 * n, 1500 + t);
    check_fd(obj, p);
  }

  // primal extraction and the fused path
  const Vec p = random_vec(2 * n, 16);
  Vec g;
  const double w = obj.value_grad(p, g);
  CHECK(w == doctest::Approx(obj.value(p)).epsilon(1e-12));
  CHECK((g - obj.gradient(p)).lpNorm<Eigen::Infinity>() <= 1e-12);
  const Vec x = obj.primal_from_dual(p);
  REQUIRE(x.size() == n);
  Vec div;
  sgp::divergence(p, s, div);
  CHECK((x - (y - beta * div)).lpNorm<Eigen::Infinity>() <= 1e-12);

  LineModel model;
  REQUIRE(obj.line_model(p, random_vec(2 * n, 17), g, model));
}

TEST_CASE("rof line model is exact") {
  const ImageShape s{6, 6};
  const int n = s.size();
  const double beta = 2.5;
  const Vec y = random_vec(n, 18, 0.0, 2.0);
  RofDualObjective obj(y, beta, s);
  const Vec p = random_vec(2 * n, 19);
  const Vec d = random_vec(2 * n, 20);
  const Vec g = obj.gradient(p);
  LineModel model;
  REQUIRE(obj.line_model(p, d, g, model));
  CHECK(model.slope == doctest::Approx(g.dot(d)).epsilon(1e-10));
  const double f0 = obj.value(p);
  for (double t : {0.3, 1.0}) {
    const double direct = obj.value(p + t * d) - f0;
    CHECK(std::abs(direct - model.delta(t)) <= 1e-10 * (1.0 + std::abs(f0)));
  }
}

TEST_CASE("objectives are convex along random chords") {
  const ImageShape s{6, 6};
  const auto op = gauss_op(s, 1.3);
  const Vec y = random_vec(s.size(), 21, 0.5, 2.0);
  const Vec b = Vec::Constant(s.size(), 0.1);
  LeastSquaresObjective ls(op, y, b);
  KlObjective kl(op, y, b);
  HsRegularizer hs(s, 0.1);
  sgp::Rng rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    const Vec x1 = random_vec(s.size(), 2000 + trial, 0.2, 3.0);
    const Vec x2 = random_vec(s.size(), 3000 + trial, 0.2, 3.0);
    const double t = rng.uniform01();
    const Vec mid = t * x1 + (1.0 - t) * x2;
    for (const Objective* obj :
         {static_cast<const Objective*>(&ls),
          static_cast<const Objective*>(&kl),
          static_cast<const Objective*>(&hs)}) {
      CHECK(obj->value(mid) <=
            t * obj->value(x1) + (1.0 - t) * obj->value(x2) + 1e-10);
    }
  }
}

TEST_CASE("least squares lipschitz constant") {
  const ImageShape s{8, 8};
  LeastSquaresObjective ident(delta_op(s), Vec::Zero(s.size()),
                              Vec::Zero(s.size()));
  CHECK(ident.lipschitz() == doctest::Approx(1.0).epsilon(1e-12));

  const Vec k = sgp::gaussian_psf(s, 1.3);
  const auto op = std::make_shared<BlurOperator>(k, s);
  LeastSquaresObjective obj(op, Vec::Zero(s.size()), Vec::Zero(s.size()));
  // normalized non-negative kernel: the zero frequency carries the kernel
  // sum = 1, and no magnitude exceeds it
  CHECK(obj.lipschitz() == doctest::Approx(1.0).epsilon(1e-12));

  // power iteration on A'A as an independent check
  Vec v = random_vec(s.size(), 23, 0.5, 1.5);
  v /= v.norm();
  double lam = 0.0;
  for (int it = 0; it < 3000; ++it) {
    Vec w = op->apply_adjoint(op->apply(v));
    lam = v.dot(w);
    const double nw = w.norm();
    REQUIRE(nw > 0.0);
    v = w / nw;
  }
  CHECK(obj.lipschitz() >= lam - 1e-8);
  CHECK(std::abs(obj.lipschitz() - lam) <= 1e-6);

  // scaling the kernel by c scales the constant by c^2
  const auto scaled = std::make_shared<BlurOperator>(3.0 * k, s);
  LeastSquaresObjective scaled_obj(scaled, Vec::Zero(s.size()),
                                   Vec::Zero(s.size()));
  CHECK(scaled_obj.lipschitz() ==
        doctest::Approx(9.0 * obj.lipschitz()).epsilon(1e-10));
}
