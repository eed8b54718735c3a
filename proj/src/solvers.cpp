#include "sgpkit/solvers.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "sgpkit/kernels.hpp"
#include "sgpkit/parallel.hpp"

namespace sgp {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
}

double compute_rre(const Vec& x, const Vec& truth) {
  const double nt = truth.norm();
  if (nt == 0.0) throw std::invalid_argument("compute_rre: zero truth");
  return (x - truth).norm() / nt;
}

double compute_gap(double f, double f_star, bool* absolute) {
  if (f_star > 0.0) {
    if (absolute) *absolute = false;
    return (f - f_star) / f_star;
  }
  if (absolute) *absolute = true;
  return f - f_star;
}

StepRule step_rule_from_name(const std::string& name) {
  if (name == "constant") return StepRule::kConstant;
  if (name == "bb1") return StepRule::kBb1;
  if (name == "bb2") return StepRule::kBb2;
  if (name == "abbmin1") return StepRule::kAbbMin1;
  if (name == "ritz") return StepRule::kRitz;
  throw std::invalid_argument("unknown steplength rule: " + name);
}

const char* step_rule_name(StepRule rule) {
  switch (rule) {
    case StepRule::kConstant: return "constant";
    case StepRule::kBb1: return "bb1";
    case StepRule::kBb2: return "bb2";
    case StepRule::kAbbMin1: return "abbmin1";
    case StepRule::kRitz: return "ritz";
  }
  return "?";
}

namespace {

double orthant_violation(const Vec& x) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] < -worst) worst = -x[i];
  return worst;
}

double disc_violation(const Vec& p) {
  const Eigen::Index n = p.size() / 2;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double rho = std::sqrt(p[i] * p[i] + p[n + i] * p[n + i]);
    if (rho - 1.0 > worst) worst = rho - 1.0;
  }
  return worst;
}

/// Per-iterate bookkeeping shared by the solver drivers: metric rows,
/// first-passage indices, and the fixed-order stop decision.
class Tracker {
 public:
  Tracker(const StopRule& stop, const ProblemContext& ctx, SolverRun& run)
      : stop_(stop), ctx_(ctx), run_(run),
        t0_(std::chrono::steady_clock::now()) {
    run_.thresholds = stop.thresholds;
    run_.rre_first.assign(stop.thresholds.size(), -1);
    run_.gap_first.assign(stop.thresholds.size(), -1);
  }

  /// Record iterate k; true means stop (run.termination is set).
  bool record_and_check(int k, double f, const Vec& x, const Vec* x_prev,
                        double alpha, double lambda, int backtracks,
                        double feas) {
    IterRecord row;
    row.iter = k;
    row.f = f;
    row.alpha = alpha;
    row.lambda = lambda;
    row.backtracks = backtracks;
    row.feas = feas;
    row.rre = ctx_.x_truth.size() ? compute_rre(x, ctx_.x_truth) : kNan;
    if (ctx_.has_f_star) {
      bool abs = false;
      row.gap = compute_gap(f, ctx_.f_star, &abs);
      run_.gap_absolute = run_.gap_absolute || abs;
    } else {
      row.gap = kNan;
    }
    row.time_s = std::chrono::duration<double>(
                     std::chrono::steady_clock::now() - t0_).count();
    for (std::size_t i = 0; i < stop_.thresholds.size(); ++i) {
      const double thr = stop_.thresholds[i];
      if (run_.rre_first[i] < 0 && !std::isnan(row.rre) && row.rre <= thr)
        run_.rre_first[i] = k;
      if (run_.gap_first[i] < 0 && !std::isnan(row.gap) && row.gap <= thr)
        run_.gap_first[i] = k;
    }
    run_.history.push_back(row);

    if (k >= stop_.max_iters) {
      run_.termination = "max-iterations";
      return true;
    }
    if (stop_.gap_stop > 0.0 && !std::isnan(row.gap) &&
        row.gap <= stop_.gap_stop) {
      run_.termination = "gap";
      return true;
    }
    if (stop_.rre_stop > 0.0 && !std::isnan(row.rre) &&
        row.rre <= stop_.rre_stop) {
      run_.termination = "rre";
      return true;
    }
    if (stop_.step_tol > 0.0 && x_prev &&
        (x - *x_prev).norm() <= stop_.step_tol * std::max(1.0, x.norm())) {
      run_.termination = "iterate-difference";
      return true;
    }
    return false;
  }

 private:
  const StopRule& stop_;
  const ProblemContext& ctx_;
  SolverRun& run_;
  std::chrono::steady_clock::time_point t0_;
};

void check_feasible_start(const Vec& x0, FeasibleSet set) {
  const double viol = set == FeasibleSet::kNonNegative ? orthant_violation(x0)
                                                       : disc_violation(x0);
  if (viol > 1e-12) throw std::invalid_argument("infeasible starting point");
}

}  // namespace

SolverRun sgp_run(const Objective& obj, const Vec& x0, const SgpOptions& opt,
                  const StopRule& stop, const ProblemContext& ctx) {
  const int n = obj.dim();
  if (x0.size() != n) throw std::invalid_argument("sgp_run: x0 size");
  if (opt.set == FeasibleSet::kUnitDiscs &&
      opt.scaling != ScalingRule::kIdentity)
    throw std::invalid_argument("disc set supports identity scaling only");
  check_feasible_start(x0, opt.set);

  SolverRun run;
  Tracker tracker(stop, ctx, run);

  Vec x = x0;
  Vec g;
  double fx = obj.value_grad(x, g);
  std::deque<double> accepted{fx};
  const int window = std::max(opt.ls.memory, 1);

  RitzSweep sweep({opt.sweep_m, opt.alpha0, opt.bounds});
  AbbMin1State abb(opt.abb, opt.bounds);
  Vec x_prev, g_prev;
  std::vector<unsigned char> disc_mask(n, 0);
  double alpha = clamp_steplength(opt.alpha0, opt.bounds);

  auto feas_now = [&](const Vec& v) {
    return opt.set == FeasibleSet::kNonNegative ? orthant_violation(v)
                                                : disc_violation(v);
  };

  bool stopped = tracker.record_and_check(0, fx, x, nullptr, 0.0, 0.0, 0,
                                          feas_now(x));
  int k = 0;
  while (!stopped) {
    try {
      Vec v_total;
      if (opt.scaling == ScalingRule::kSplit) {
        Vec u;
        obj.uv_split(x, u, v_total);
      }
      const DiagScaling scale = build_scaling(
          opt.scaling, x, g,
          opt.hess_diag.size() ? &opt.hess_diag : nullptr,
          v_total.size() ? &v_total : nullptr, opt.scale_lo, opt.scale_hi);

      Vec gbar;
      switch (opt.step) {
        case StepRule::kConstant:
          alpha = clamp_steplength(opt.const_alpha, opt.bounds);
          break;
        case StepRule::kBb1:
          if (k > 0) alpha = bb1(x - x_prev, g - g_prev, scale.d, opt.bounds);
          break;
        case StepRule::kBb2:
          if (k > 0) alpha = bb2(x - x_prev, g - g_prev, scale.d, opt.bounds);
          break;
        case StepRule::kAbbMin1:
          if (k > 0) alpha = abb.select(x - x_prev, g - g_prev, scale.d);
          break;
        case StepRule::kRitz: {
          std::vector<unsigned char> mask(n, 0);
          if (opt.set == FeasibleSet::kNonNegative) {
            // active set by exact zero: the projection snaps entries to 0
            for (int i = 0; i < n; ++i) mask[i] = (x[i] == 0.0) ? 1 : 0;
          } else {
            mask = disc_mask;  // criterion needs the direction; reuse last
          }
          gbar = sweep.make_column(g, scale.d, mask);
          alpha = sweep.next_alpha(gbar);
          break;
        }
      }

      Vec target(n);
      for (int i = 0; i < n; ++i) target[i] = x[i] - alpha * scale.d[i] * g[i];
      const Vec projected = opt.set == FeasibleSet::kNonNegative
                                ? project_nonneg(target)
                                : project_unit_discs(target);
      const Vec d = projected - x;

      const double f_ref = armijo_reference(accepted, opt.ls.memory);
      LineModel model;
      const bool have_model =
          opt.use_line_model && obj.line_model(x, d, g, model);
      const double slope =
          have_model ? model.slope : det_dot(g.data(), d.data(), n);
      if (slope > 0.0) {
        // projection guarantees descent in exact arithmetic; a positive
        // slope is rounding noise at a stationary point
        run.termination = "stationary";
        break;
      }
      LinesearchResult ls;
      if (have_model) {
        ls = armijo_backtrack(
            [&](double t) { return fx + model.delta(t); }, f_ref, slope,
            opt.ls);
      } else if (d.isZero(0.0)) {
        ls.lambda = 1.0;
        ls.f_new = fx;
      } else {
        ls = armijo_backtrack(
            [&](double t) { return obj.value(x + t * d); }, f_ref, slope,
            opt.ls);
      }
      run.ls_warning = run.ls_warning || ls.hit_limit;

      Vec x_new = x + ls.lambda * d;
      if (opt.step == StepRule::kRitz) {
        Vec column;
        if (opt.set == FeasibleSet::kUnitDiscs) {
          // keep components the projection left untouched:
          // |d_j + alpha*g_j| below a small threshold
          const double eps =
              opt.disc_mask_eps * (1.0 + g.lpNorm<Eigen::Infinity>());
          std::vector<unsigned char> mask(n);
          for (int i = 0; i < n; ++i)
            mask[i] = (std::abs(d[i] + alpha * g[i]) >= eps) ? 1 : 0;
          column = sweep.make_column(g, scale.d, mask);
          disc_mask = mask;
        } else {
          column = gbar;
        }
        const double recorded =
            opt.sweep_record == SweepRecord::kPostStep ? ls.lambda * alpha
                                                       : alpha;
        sweep.push(column, recorded);
      }

      x_prev = x;
      g_prev = g;
      x = std::move(x_new);
      g = obj.gradient(x);
      fx = ls.f_new;
      accepted.push_back(fx);
      if (static_cast<int>(accepted.size()) > window) accepted.pop_front();
      ++k;
      stopped = tracker.record_and_check(k, fx, x, &x_prev, alpha, ls.lambda,
                                         ls.backtracks, feas_now(x));
    } catch (const std::domain_error& e) {
      run.termination = std::string("domain violation: ") + e.what();
      break;
    }
  }

  run.x_final = x;
  run.factorizations = sweep.factorizations();
  run.sweep_products = sweep.sweep_products();
  run.rhs_products = sweep.rhs_products();
  return run;
}

double gp_extra_theta(int k) { return k <= 0 ? 2.0 / 3.0 : 2.0 / (k + 2); }

double gp_extra_eta(int k) {
  if (k <= 0) return 0.0;
  const double prev = gp_extra_theta(k - 1);
  return gp_extra_theta(k) * (1.0 - prev) / prev;
}

SolverRun gp_extra_run(const Objective& obj, const Vec& x0, double lipschitz,
                       const StopRule& stop, const ProblemContext& ctx) {
  if (!(lipschitz > 0.0) || !std::isfinite(lipschitz))
    throw std::invalid_argument("gp_extra_run: Lipschitz constant required");
  check_feasible_start(x0, FeasibleSet::kNonNegative);

  SolverRun run;
  Tracker tracker(stop, ctx, run);
  Vec x = x0, x_prev = x0;
  double fx = obj.value(x);
  const double step = 1.0 / lipschitz;

  bool stopped = tracker.record_and_check(0, fx, x, nullptr, 0.0, 0.0, 0,
                                          orthant_violation(x));
  int k = 0;
  while (!stopped) {
    const double eta = gp_extra_eta(k);
    const Vec xbar = x + eta * (x - x_prev);
    const Vec gbar = obj.gradient(xbar);
    Vec x_new = project_nonneg(xbar - step * gbar);
    x_prev = x;
    x = std::move(x_new);
    fx = obj.value(x);
    ++k;
    stopped = tracker.record_and_check(k, fx, x, &x_prev, step, 1.0, 0,
                                       orthant_violation(x));
  }
  run.x_final = x;
  return run;
}

Vec isra_step(const LeastSquaresObjective& obj, const Vec& x) {
  Vec u, v;
  obj.uv_split(x, u, v);
  Vec out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (v[i] == 0.0)
      throw std::domain_error("zero denominator in multiplicative step");
    out[i] = x[i] * u[i] / v[i];
  }
  return out;
}

Vec rl_step(const KlObjective& obj, const Vec& x) {
  Vec u, v;
  obj.uv_split(x, u, v);
  Vec out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (v[i] == 0.0)
      throw std::domain_error("zero denominator in multiplicative step");
    out[i] = x[i] / v[i] * u[i];
  }
  return out;
}

namespace {

template <class ObjT, class StepFn>
SolverRun multiplicative_run(const ObjT& obj, const Vec& x0,
                             const StopRule& stop, const ProblemContext& ctx,
                             StepFn step_fn) {
  check_feasible_start(x0, FeasibleSet::kNonNegative);
  SolverRun run;
  Tracker tracker(stop, ctx, run);
  Vec x = x0;
  double fx = obj.value(x);
  bool stopped = tracker.record_and_check(0, fx, x, nullptr, 0.0, 0.0, 0,
                                          orthant_violation(x));
  int k = 0;
  while (!stopped) {
    try {
      Vec x_new = step_fn(obj, x);
      const Vec prev = x;
      x = std::move(x_new);
      fx = obj.value(x);
      ++k;
      stopped = tracker.record_and_check(k, fx, x, &prev, 1.0, 1.0, 0,
                                         orthant_violation(x));
    } catch (const std::domain_error& e) {
      run.termination = std::string("domain violation: ") + e.what();
      break;
    }
  }
  run.x_final = x;
  return run;
}

}  // namespace

SolverRun isra_run(const LeastSquaresObjective& obj, const Vec& x0,
                   const StopRule& stop, const ProblemContext& ctx) {
  return multiplicative_run(obj, x0, stop, ctx,
                            [](const LeastSquaresObjective& o, const Vec& x) {
                              return isra_step(o, x);
                            });
}

SolverRun rl_run(const KlObjective& obj, const Vec& x0, const StopRule& stop,
                 const ProblemContext& ctx) {
  return multiplicative_run(
      obj, x0, stop, ctx,
      [](const KlObjective& o, const Vec& x) { return rl_step(o, x); });
}

SolverRun chambolle_run(const RofDualObjective& obj, const Vec& p0,
                        const ChambolleOptions& opt, const StopRule& stop,
                        const ProblemContext& ctx) {
  if (!(opt.tau < 0.25) || !(opt.tau > 0.0))
    throw std::invalid_argument("chambolle_run: tau must be in (0,  0.25)");
  if (p0.size() != obj.dim())
    throw std::invalid_argument("chambolle_run: p0 size");
  check_feasible_start(p0, FeasibleSet::kUnitDiscs);

  SolverRun run;
  Tracker tracker(stop, ctx, run);
  const ImageShape shape = obj.shape();
  const int n = shape.size();
  const double beta = obj.beta();

  Vec p = p0;
  double w = obj.value(p);
  bool stopped =
      tracker.record_and_check(0, w, p, nullptr, opt.tau, 1.0, 0,
                               disc_violation(p));
  int k = 0;
  Vec div(n), resid(n), drive(2 * n);
  while (!stopped) {
    Vec p_new(2 * n);
    if (opt.literal_update) {
      // As commonly printed: divide the stepped pair by the OLD pair norm.
      // Undefined at zero pairs; kept verbatim behind this flag.
      const Vec grad = obj.gradient(p);
      for (int i = 0; i < n; ++i) {
        const double rho = std::sqrt(p[i] * p[i] + p[n + i] * p[n + i]);
        p_new[i] = (p[i] - opt.tau * grad[i]) / rho;
        p_new[n + i] = (p[n + i] - opt.tau * grad[n + i]) / rho;
      }
    } else {
      // Semi-implicit scheme on the normalized driven term
      // t = grad_image(div p - y/beta)  (= -gradW / (2 beta^2)):
      // each pair moves by tau*t and is damped by 1 + tau*|t|, which keeps
      // it inside the unit disc.
      divergence(p, shape, div);
      resid = div - obj.data() / beta;
      grad_forward(resid, shape, drive);
      for (int i = 0; i < n; ++i) {
        const double rho = std::sqrt(drive[i] * drive[i] +
                                     drive[n + i] * drive[n + i]);
        const double damp = 1.0 + opt.tau * rho;
        p_new[i] = (p[i] + opt.tau * drive[i]) / damp;
        p_new[n + i] = (p[n + i] + opt.tau * drive[n + i]) / damp;
      }
    }
    const Vec prev = p;
    p = std::move(p_new);
    w = obj.value(p);
    ++k;
    stopped = tracker.record_and_check(k, w, p, &prev, opt.tau, 1.0, 0,
                                       disc_violation(p));
  }
  run.x_final = p;
  return run;
}

void write_history_csv(const std::string& path, const SolverRun& run) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "iter,f,alpha,lambda,rre,gap,time_s\n";
  for (const IterRecord& r : run.history) {
    out << r.iter << ',' << format_double(r.f) << ',' << format_double(r.alpha)
        << ',' << format_double(r.lambda) << ',' << format_double(r.rre) << ','
        << format_double(r.gap) << ',' << format_double(r.time_s) << '\n';
  }
}

}  // namespace sgp
