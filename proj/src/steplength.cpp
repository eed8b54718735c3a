#include "sgpkit/steplength.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sgpkit/parallel.hpp"

namespace sgp {

double clamp_steplength(double raw, const StepBounds& b) {
  if (!std::isfinite(raw) || raw <= 0.0) return b.alpha_max;
  return std::min(std::max(raw, b.alpha_min), b.alpha_max);
}

double bb1(const Vec& s, const Vec& z, const Vec& d, const StepBounds& b) {
  if (s.size() != z.size() || s.size() != d.size())
    throw std::invalid_argument("bb1: length mismatch");
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    num += s[i] * s[i] / (d[i] * d[i]);
    den += s[i] * z[i] / d[i];
  }
  return clamp_steplength(num / den, b);
}

double bb2(const Vec& s, const Vec& z, const Vec& d, const StepBounds& b) {
  if (s.size() != z.size() || s.size() != d.size())
    throw std::invalid_argument("bb2: length mismatch");
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    num += s[i] * d[i] * z[i];
    den += z[i] * d[i] * d[i] * z[i];
  }
  return clamp_steplength(num / den, b);
}

AbbMin1State::AbbMin1State(AbbMin1Config cfg, StepBounds bounds)
    : cfg_(cfg), bounds_(bounds), tau_(cfg.tau0) {}

double AbbMin1State::select(const Vec& s, const Vec& z, const Vec& d) {
  const double a1 = bb1(s, z, d, bounds_);
  const double a2 = bb2(s, z, d, bounds_);
  bb2_hist_.push_back(a2);
  if (static_cast<int>(bb2_hist_.size()) > cfg_.history)
    bb2_hist_.pop_front();
  ++count_;
  if (count_ <= cfg_.warmup) return a2;
  if (a2 / a1 < tau_) {
    tau_ *= cfg_.tau_down;
    return *std::min_element(bb2_hist_.begin(), bb2_hist_.end());
  }
  tau_ *= cfg_.tau_up;
  return a1;
}

RitzSweep::RitzSweep(SweepConfig cfg) : cfg_(cfg) {
  if (cfg_.m < 1) throw std::invalid_argument("sweep length must be >= 1");
  fallback_ = clamp_steplength(cfg_.alpha0, cfg_.bounds);
}

Vec RitzSweep::make_column(const Vec& g, const Vec& d,
                           const std::vector<unsigned char>& active_mask) {
  if (g.size() != d.size() ||
      active_mask.size() != static_cast<std::size_t>(g.size()))
    throw std::invalid_argument("make_column: length mismatch");
  Vec col(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i)
    col[i] = active_mask[i] ? 0.0 : std::sqrt(d[i]) * g[i];
  ++col_products_;
  return col;
}

void RitzSweep::push(const Vec& column, double alpha_used) {
  if (!(alpha_used > 0.0))
    throw std::invalid_argument("push: steplength must be positive");
  cols_.push_back(column);
  alphas_.push_back(alpha_used);
  if (static_cast<int>(cols_.size()) > cfg_.m) {
    cols_.pop_front();
    alphas_.pop_front();
  }
}

std::vector<double> RitzSweep::ritz_values(const Vec& gbar, Mat* phi,
                                           Mat* phi_sym) {
  const int j0 = static_cast<int>(cols_.size());
  if (j0 == 0) return {};

  // Gram matrix and right-hand side, computed once; the rank-deficiency
  // retry below reuses trailing blocks.
  Mat gram(j0, j0);
  for (int a = 0; a < j0; ++a)
    for (int b = a; b < j0; ++b) {
      gram(a, b) = det_dot(cols_[a].data(), cols_[b].data(), cols_[a].size());
      gram(b, a) = gram(a, b);
    }
  gram_products_ += j0 * (j0 + 1) / 2;
  Vec rhs_full(j0);
  for (int a = 0; a < j0; ++a)
    rhs_full[a] = det_dot(cols_[a].data(), gbar.data(), gbar.size());
  rhs_products_ += j0;

  // Drop the oldest columns on rank deficiency and retry with fewer.
  for (int j = j0; j >= 1; --j) {
    const Mat gj = gram.bottomRightCorner(j, j);
    const double tr = gj.trace();
    if (!std::isfinite(tr) || tr <= 0.0) break;

    Mat r = Mat::Zero(j, j);
    bool ok = true;
    for (int c = 0; c < j && ok; ++c) {
      double s = gj(c, c);
      for (int k = 0; k < c; ++k) s -= r(k, c) * r(k, c);
      if (!std::isfinite(s) || s <= 1e-12 * tr) {
        ok = false;
        break;
      }
      r(c, c) = std::sqrt(s);
      for (int cc = c + 1; cc < j; ++cc) {
        double t = gj(c, cc);
        for (int k = 0; k < c; ++k) t -= r(k, c) * r(k, cc);
        r(c, cc) = t / r(c, c);
      }
    }
    if (!ok) continue;

    const Vec rr =
        r.transpose().triangularView<Eigen::Lower>().solve(rhs_full.tail(j));

    // Bidiagonal steplength-recurrence matrix from the last j steplengths.
    Mat gamma = Mat::Zero(j + 1, j);
    for (int t = 0; t < j; ++t) {
      const double inv_a = 1.0 / alphas_[j0 - j + t];
      gamma(t, t) = inv_a;
      gamma(t + 1, t) = -inv_a;
    }
    Mat ext(j, j + 1);
    ext.leftCols(j) = r;
    ext.col(j) = rr;
    Mat proj = ext * gamma;  // j x j
    r.triangularView<Eigen::Upper>()
        .solveInPlace<Eigen::OnTheRight>(proj);  // proj <- proj * r^{-1}

    Mat sym = Mat::Zero(j, j);
    for (int a = 0; a < j; ++a) {
      sym(a, a) = proj(a, a);
      for (int b = 0; b < a; ++b) {
        sym(a, b) = proj(a, b);
        sym(b, a) = proj(a, b);
      }
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(sym);
    if (es.info() != Eigen::Success) break;
    ++factorizations_;
    if (phi) *phi = proj;
    if (phi_sym) *phi_sym = sym;
    const Vec& ev = es.eigenvalues();
    return std::vector<double>(ev.data(), ev.data() + ev.size());
  }
  return {};
}

double RitzSweep::next_alpha(const Vec& gbar) {
  if (queue_.empty() && static_cast<int>(cols_.size()) == cfg_.m) {
    const std::vector<double> eigs = ritz_values(gbar);
    // ascending eigenvalues; queue reciprocals of the positive ones so the
    // steplengths come out in increasing order
    for (auto it = eigs.rbegin(); it != eigs.rend(); ++it)
      if (*it > 0.0)
        queue_.push_back(clamp_steplength(1.0 / *it, cfg_.bounds));
  }
  double a;
  if (!queue_.empty()) {
    a = queue_.front();
    queue_.pop_front();
  } else {
    a = fallback_;
  }
  fallback_ = a;
  return a;
}

}  // namespace sgp
