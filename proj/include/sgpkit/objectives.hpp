#pragma once

#include <memory>
#include <stdexcept>

#include "sgpkit/blur_operator.hpp"
#include "sgpkit/image.hpp"

namespace sgp {

/// Exact quadratic restriction of an objective to a ray: for objectives that
/// support it, f(x + t*d) = f(x) + t*slope + 0.5*t^2*curvature exactly.
/// Linesearches use this to evaluate trial decreases without the
/// cancellation that plagues f(x + t*d) - f(x) near convergence.
struct LineModel {
  double slope = 0.0;
  double curvature = 0.0;
  double delta(double t) const {
    return t * slope + 0.5 * t * t * curvature;
  }
};

class Objective {
 public:
  virtual ~Objective() = default;

  virtual int dim() const = 0;
  virtual double value(const Vec& x) const = 0;
  virtual Vec gradient(const Vec& x) const = 0;

  /// Fused evaluation; overridden where value and gradient share work.
  virtual double value_grad(const Vec& x, Vec& g) const {
    g = gradient(x);
    return value(x);
  }

  /// Gradient splitting u - v = -grad with u >= 0, v > 0 on the domain.
  /// Only objectives used with the split scaling provide one.
  virtual void uv_split(const Vec&, Vec&, Vec&) const {
    throw std::logic_error("objective has no gradient splitting");
  }
  virtual bool has_uv_split() const { return false; }

  /// Exact line model at (x, d); g must be gradient(x). Returns false when
  /// the objective has no closed ray restriction.
  virtual bool line_model(const Vec& x, const Vec& d, const Vec& g,
                          LineModel& out) const {
    (void)x;
    (void)d;
    (void)g;
    (void)out;
    return false;
  }
};

/// f(x) = 1/2 x'Ax - y'x with A symmetric positive definite.
class QuadraticObjective : public Objective {
 public:
  QuadraticObjective(Mat a, Vec y);

  int dim() const override { return static_cast<int>(y_.size()); }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  double value_grad(const Vec& x, Vec& g) const override;
  bool line_model(const Vec& x, const Vec& d, const Vec& g,
                  LineModel& out) const override;

  Vec hessian_diag() const { return a_.diagonal(); }
  const Mat& matrix() const { return a_; }
  const Vec& linear_term() const { return y_; }

 private:
  Mat a_;
  Vec y_;
};

/// f(x) = 1/2 ||Ax + b - y||^2 for a periodic blur A.
class LeastSquaresObjective : public Objective {
 public:
  LeastSquaresObjective(std::shared_ptr<const BlurOperator> op, Vec y, Vec b);

  int dim() const override { return static_cast<int>(y_.size()); }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  double value_grad(const Vec& x, Vec& g) const override;
  void uv_split(const Vec& x, Vec& u, Vec& v) const override;
  bool has_uv_split() const override { return true; }
  bool line_model(const Vec& x, const Vec& d, const Vec& g,
                  LineModel& out) const override;

  /// Smallest Lipschitz constant of the gradient: max |spectrum|^2.
  double lipschitz() const { return op_->normal_operator_norm(); }
  const BlurOperator& op() const { return *op_; }

 private:
  std::shared_ptr<const BlurOperator> op_;
  Vec y_, b_;
  Vec adj_y_;  // A'y, the non-negative part of the splitting
};

/// Generalized Kullback-Leibler divergence between y and Ax + b, the Poisson
/// negative log-likelihood up to constants; 0*ln(0) reads as 0.
class KlObjective : public Objective {
 public:
  KlObjective(std::shared_ptr<const BlurOperator> op, Vec y, Vec b);

  int dim() const override { return static_cast<int>(y_.size()); }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  double value_grad(const Vec& x, Vec& g) const override;
  void uv_split(const Vec& x, Vec& u, Vec& v) const override;
  bool has_uv_split() const override { return true; }

  const BlurOperator& op() const { return *op_; }
  const Vec& adjoint_of_ones() const { return adj_ones_; }

 private:
  Vec model(const Vec& x) const;  // Ax + b, domain-checked
  std::shared_ptr<const BlurOperator> op_;
  Vec y_, b_;
  Vec adj_ones_;  // A'1, the positive part of the splitting
};

/// Smoothed total-variation (hypersurface) penalty
/// sum_ij sqrt(|grad x|_ij^2 + delta^2), periodic boundary.
class HsRegularizer : public Objective {
 public:
  HsRegularizer(ImageShape shape, double delta);

  int dim() const override { return shape_.size(); }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  void uv_split(const Vec& x, Vec& u, Vec& v) const override;
  bool has_uv_split() const override { return true; }

 private:
  ImageShape shape_;
  double delta_;
};

/// data term + beta * regularizer, with the combined splitting
/// (u0 + beta*uR, v0 + beta*vR).
class CompositeObjective : public Objective {
 public:
  CompositeObjective(std::shared_ptr<const Objective> data,
                     std::shared_ptr<const Objective> reg, double beta);

  int dim() const override { return data_->dim(); }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  double value_grad(const Vec& x, Vec& g) const override;
  void uv_split(const Vec& x, Vec& u, Vec& v) const override;
  bool has_uv_split() const override { return true; }

 private:
  std::shared_ptr<const Objective> data_;
  std::shared_ptr<const Objective> reg_;
  double beta_;
};

/// Dual objective of the TV denoising model: W(p) = ||beta*div(p) - y||^2
/// over stacked dual fields p of length 2*n (no 1/2 factor by convention).
class RofDualObjective : public Objective {
 public:
  RofDualObjective(Vec y, double beta, ImageShape shape);

  int dim() const override { return 2 * shape_.size(); }
  double value(const Vec& p) const override;
  Vec gradient(const Vec& p) const override;
  double value_grad(const Vec& p, Vec& g) const override;
  bool line_model(const Vec& p, const Vec& d, const Vec& g,
                  LineModel& out) const override;

  /// Primal image implied by a dual iterate: x = y - beta*div(p).
  Vec primal_from_dual(const Vec& p) const;

  double beta() const { return beta_; }
  ImageShape shape() const { return shape_; }
  const Vec& data() const { return y_; }

 private:
  Vec y_;
  double beta_;
  ImageShape shape_;
};

}  // namespace sgp
