#include "sgpkit/objectives.hpp"

#include <cmath>

#include "sgpkit/kernels.hpp"
#include "sgpkit/parallel.hpp"

namespace sgp {

// ---------------------------------------------------------------- quadratic

QuadraticObjective::QuadraticObjective(Mat a, Vec y)
    : a_(std::move(a)), y_(std::move(y)) {
  if (a_.rows() != a_.cols() || a_.rows() != y_.size())
    throw std::invalid_argument("quadratic objective: shape mismatch");
}

double QuadraticObjective::value(const Vec& x) const {
  return 0.5 * x.dot(a_ * x) - y_.dot(x);
}

Vec QuadraticObjective::gradient(const Vec& x) const { return a_ * x - y_; }

double QuadraticObjective::value_grad(const Vec& x, Vec& g) const {
  const Vec ax = a_ * x;
  g = ax - y_;
  return 0.5 * x.dot(ax) - y_.dot(x);
}

bool QuadraticObjective::line_model(const Vec&, const Vec& d, const Vec& g,
                                    LineModel& out) const {
  out.slope = g.dot(d);
  out.curvature = d.dot(a_ * d);
  return true;
}

// -------------------------------------------------------------------- LS

LeastSquaresObjective::LeastSquaresObjective(
    std::shared_ptr<const BlurOperator> op, Vec y, Vec b)
    : op_(std::move(op)), y_(std::move(y)), b_(std::move(b)) {
  if (y_.size() != op_->shape().size() || b_.size() != y_.size())
    throw std::invalid_argument("least squares: shape mismatch");
  adj_y_ = op_->apply_adjoint(y_);
}

double LeastSquaresObjective::value(const Vec& x) const {
  const Vec r = op_->apply(x) + b_ - y_;
  return 0.5 * det_dot(r.data(), r.data(), r.size());
}

Vec LeastSquaresObjective::gradient(const Vec& x) const {
  return op_->apply_adjoint(op_->apply(x) + b_ - y_);
}

double LeastSquaresObjective::value_grad(const Vec& x, Vec& g) const {
  const Vec r = op_->apply(x) + b_ - y_;
  g = op_->apply_adjoint(r);
  return 0.5 * det_dot(r.data(), r.data(), r.size());
}

void LeastSquaresObjective::uv_split(const Vec& x, Vec& u, Vec& v) const {
  u = adj_y_;
  v = op_->apply_adjoint(op_->apply(x) + b_);
}

bool LeastSquaresObjective::line_model(const Vec&, const Vec& d, const Vec& g,
                                       LineModel& out) const {
  const Vec ad = op_->apply(d);
  out.slope = det_dot(g.data(), d.data(), d.size());
  out.curvature = det_dot(ad.data(), ad.data(), ad.size());
  return true;
}

// -------------------------------------------------------------------- KL

KlObjective::KlObjective(std::shared_ptr<const BlurOperator> op, Vec y, Vec b)
    : op_(std::move(op)), y_(std::move(y)), b_(std::move(b)) {
  if (y_.size() != op_->shape().size() || b_.size() != y_.size())
    throw std::invalid_argument("KL objective: shape mismatch");
  if ((y_.array() < 0.0).any())
    throw std::invalid_argument("KL objective: negative counts");
  adj_ones_ = op_->apply_adjoint(Vec::Ones(y_.size()));
}

Vec KlObjective::model(const Vec& x) const {
  Vec m = op_->apply(x) + b_;
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (!(m[i] >= 1e-300)) throw std::domain_error("KL domain violation");
  return m;
}

namespace {
double kl_terms(const Vec& y, const Vec& m) {
  Vec t(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    // 0*ln(0) reads as 0, so zero-count pixels contribute m alone
    t[i] = (y[i] > 0.0) ? y[i] * std::log(y[i] / m[i]) + m[i] - y[i] : m[i];
  }
  return det_sum(t.data(), t.size());
}
}  // namespace

double KlObjective::value(const Vec& x) const {
  return kl_terms(y_, model(x));
}

Vec KlObjective::gradient(const Vec& x) const {
  const Vec m = model(x);
  return op_->apply_adjoint(Vec::Ones(m.size()) - y_.cwiseQuotient(m));
}

double KlObjective::value_grad(const Vec& x, Vec& g) const {
  const Vec m = model(x);
  g = op_->apply_adjoint(Vec::Ones(m.size()) - y_.cwiseQuotient(m));
  return kl_terms(y_, m);
}

void KlObjective::uv_split(const Vec& x, Vec& u, Vec& v) const {
  const Vec m = model(x);
  u = op_->apply_adjoint(y_.cwiseQuotient(m));
  v = adj_ones_;
}

// -------------------------------------------------------------------- HS

HsRegularizer::HsRegularizer(ImageShape shape, double delta)
    : shape_(shape), delta_(delta) {
  if (!(delta > 0.0))
    throw std::invalid_argument("smoothing parameter must be positive");
}

double HsRegularizer::value(const Vec& x) const {
  Vec phi;
  edge_magnitude(x, shape_, delta_, phi);
  return det_sum(phi.data(), phi.size());
}

Vec HsRegularizer::gradient(const Vec& x) const {
  // analytic gradient = v - u, so the splitting identity is exact
  Vec u, v;
  hs_split(x, shape_, delta_, u, v);
  return v - u;
}

void HsRegularizer::uv_split(const Vec& x, Vec& u, Vec& v) const {
  hs_split(x, shape_, delta_, u, v);
}

// --------------------------------------------------------------- composite

CompositeObjective::CompositeObjective(std::shared_ptr<const Objective> data,
                                       std::shared_ptr<const Objective> reg,
                                       double beta)
    : data_(std::move(data)), reg_(std::move(reg)), beta_(beta) {
  if (data_->dim() != reg_->dim())
    throw std::invalid_argument("composite objective: dimension mismatch");
  if (beta < 0.0)
    throw std::invalid_argument("regularization weight must be >= 0");
}

double CompositeObjective::value(const Vec& x) const {
  return data_->value(x) + beta_ * reg_->value(x);
}

Vec CompositeObjective::gradient(const Vec& x) const {
  return data_->gradient(x) + beta_ * reg_->gradient(x);
}

double CompositeObjective::value_grad(const Vec& x, Vec& g) const {
  Vec gr;
  const double f0 = data_->value_grad(x, g);
  const double fr = reg_->value_grad(x, gr);
  g += beta_ * gr;
  return f0 + beta_ * fr;
}

void CompositeObjective::uv_split(const Vec& x, Vec& u, Vec& v) const {
  Vec ur, vr;
  data_->uv_split(x, u, v);
  reg_->uv_split(x, ur, vr);
  u += beta_ * ur;
  v += beta_ * vr;
}

// -------------------------------------------------------------- ROF dual

RofDualObjective::RofDualObjective(Vec y, double beta, ImageShape shape)
    : y_(std::move(y)), beta_(beta), shape_(shape) {
  if (y_.size() != shape.size())
    throw std::invalid_argument("ROF dual: shape mismatch");
  if (!(beta > 0.0))
    throw std::invalid_argument("ROF weight must be positive");
}

double RofDualObjective::value(const Vec& p) const {
  Vec div;
  divergence(p, shape_, div);
  const Vec r = beta_ * div - y_;
  return det_dot(r.data(), r.data(), r.size());
}

Vec RofDualObjective::gradient(const Vec& p) const {
  Vec div;
  divergence(p, shape_, div);
  const Vec r = beta_ * div - y_;
  Vec g;
  grad_forward(r, shape_, g);
  return -2.0 * beta_ * g;
}

double RofDualObjective::value_grad(const Vec& p, Vec& g) const {
  Vec div;
  divergence(p, shape_, div);
  const Vec r = beta_ * div - y_;
  grad_forward(r, shape_, g);
  g *= -2.0 * beta_;
  return det_dot(r.data(), r.data(), r.size());
}

bool RofDualObjective::line_model(const Vec&, const Vec& d, const Vec& g,
                                  LineModel& out) const {
  Vec div_d;
  divergence(d, shape_, div_d);
  out.slope = det_dot(g.data(), d.data(), d.size());
  out.curvature =
      2.0 * beta_ * beta_ * det_dot(div_d.data(), div_d.data(), div_d.size());
  return true;
}

Vec RofDualObjective::primal_from_dual(const Vec& p) const {
  Vec div;
  divergence(p, shape_, div);
  return y_ - beta_ * div;
}

}  // namespace sgp
