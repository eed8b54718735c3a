#pragma once

#include "sgpkit/image.hpp"

namespace sgp {

inline constexpr double kScaleLo = 1e-5;
inline constexpr double kScaleHi = 1e5;

/// Diagonal of a positive definite scaling matrix with eigenvalues clamped
/// into [l1, l2].
struct DiagScaling {
  Vec d;
  double l1 = kScaleLo;
  double l2 = kScaleHi;
};

enum class ScalingRule {
  kIdentity,      // D = I
  kInvHessDiag,   // D = diag(hessian diagonal)^{-1}, stationary
  kColemanLi,     // d_i = x_i where the gradient is non-negative, else 1
  kIterate,       // d_i = x_i
  kSplit,         // d = x / v_total with v_total from the gradient splitting
};

ScalingRule scaling_rule_from_name(const std::string& name);
const char* scaling_rule_name(ScalingRule rule);

/// Assemble the scaling diagonal for `rule` and clamp it into [l1, l2].
/// hess_diag is required by kInvHessDiag; v_total (floored at 1e-12 before
/// dividing) by kSplit. With l1 = l2 = 1 every rule degenerates to the
/// identity.
DiagScaling build_scaling(ScalingRule rule, const Vec& x, const Vec& grad,
                          const Vec* hess_diag, const Vec* v_total,
                          double l1 = kScaleLo, double l2 = kScaleHi);

/// Projection onto the non-negative orthant. For any positive diagonal
/// metric the projection is the same componentwise max(x, 0), so no scaling
/// argument is needed.
Vec project_nonneg(const Vec& x);

/// Projection onto the product of per-pixel unit discs for a stacked dual
/// field of length 2*n (component i paired with component i+n).
Vec project_unit_discs(const Vec& p);

}  // namespace sgp
