#include "sgpkit/feasible.hpp"

#include <cmath>
#include <stdexcept>

#include "sgpkit/kernels.hpp"
#include "sgpkit/parallel.hpp"

namespace sgp {

ScalingRule scaling_rule_from_name(const std::string& name) {
  if (name == "identity") return ScalingRule::kIdentity;
  if (name == "inv-hess-diag") return ScalingRule::kInvHessDiag;
  if (name == "coleman-li") return ScalingRule::kColemanLi;
  if (name == "iterate") return ScalingRule::kIterate;
  if (name == "split") return ScalingRule::kSplit;
  throw std::invalid_argument("unknown scaling rule: " + name);
}

const char* scaling_rule_name(ScalingRule rule) {
  switch (rule) {
    case ScalingRule::kIdentity: return "identity";
    case ScalingRule::kInvHessDiag: return "inv-hess-diag";
    case ScalingRule::kColemanLi: return "coleman-li";
    case ScalingRule::kIterate: return "iterate";
    case ScalingRule::kSplit: return "split";
  }
  return "?";
}

DiagScaling build_scaling(ScalingRule rule, const Vec& x, const Vec& grad,
                          const Vec* hess_diag, const Vec* v_total, double l1,
                          double l2) {
  if (!(0.0 < l1 && l1 <= l2))
    throw std::invalid_argument("scaling bounds must satisfy 0 < l1 <= l2");
  const Eigen::Index n = x.size();
  DiagScaling out;
  out.l1 = l1;
  out.l2 = l2;
  out.d.resize(n);
  switch (rule) {
    case ScalingRule::kIdentity:
      out.d.setOnes();
      break;
    case ScalingRule::kInvHessDiag: {
      if (!hess_diag || hess_diag->size() != n)
        throw std::invalid_argument("inv-hess-diag rule needs the diagonal");
      for (Eigen::Index i = 0; i < n; ++i) out.d[i] = 1.0 / (*hess_diag)[i];
      break;
    }
    case ScalingRule::kColemanLi:
      for (Eigen::Index i = 0; i < n; ++i)
        out.d[i] = (grad[i] >= 0.0) ? x[i] : 1.0;
      break;
    case ScalingRule::kIterate:
      out.d = x;
      break;
    case ScalingRule::kSplit: {
      if (!v_total || v_total->size() != n)
        throw std::invalid_argument("split rule needs the V part");
      for (Eigen::Index i = 0; i < n; ++i) {
        const double den = std::max((*v_total)[i], 1e-12);
        if (!std::isfinite(den))
          throw std::domain_error("split scaling: bad denominator");
        out.d[i] = x[i] / den;
      }
      break;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    double v = out.d[i];
    if (!std::isfinite(v)) throw std::domain_error("scaling entry not finite");
    out.d[i] = std::min(l2, std::max(l1, v));
  }
  return out;
}

Vec project_nonneg(const Vec& x) {
  Vec out(x.size());
  parallel_for(x.size(), [&](std::size_t i) {
    out[i] = x[i] > 0.0 ? x[i] : 0.0;
  });
  return out;
}

Vec project_unit_discs(const Vec& p) {
  if (p.size() % 2 != 0)
    throw std::invalid_argument("dual field must have even length");
  Vec out = p;
  project_discs(out, static_cast<int>(p.size() / 2));
  return out;
}

}  // namespace sgp
