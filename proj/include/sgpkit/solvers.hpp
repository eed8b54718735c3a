#pragma once

#include <limits>
#include <string>
#include <vector>

#include "sgpkit/feasible.hpp"
#include "sgpkit/image.hpp"
#include "sgpkit/linesearch.hpp"
#include "sgpkit/objectives.hpp"
#include "sgpkit/steplength.hpp"

namespace sgp {

/// Relative reconstruction error ||x - truth|| / ||truth||.
double compute_rre(const Vec& x, const Vec& truth);

/// Relative objective gap (f - f_star)/f_star. When f_star <= 0 the gap is
/// absolute instead and *absolute is set.
double compute_gap(double f, double f_star, bool* absolute = nullptr);

enum class StepRule { kConstant, kBb1, kBb2, kAbbMin1, kRitz };
StepRule step_rule_from_name(const std::string& name);
const char* step_rule_name(StepRule rule);

/// Which steplength the sweep records for the recurrence: the value handed
/// to the projection (pre) or the realized lambda*alpha (post).
enum class SweepRecord { kPreStep, kPostStep };

enum class FeasibleSet { kNonNegative, kUnitDiscs };

struct SgpOptions {
  ScalingRule scaling = ScalingRule::kIdentity;
  double scale_lo = kScaleLo;
  double scale_hi = kScaleHi;
  Vec hess_diag;  // required by ScalingRule::kInvHessDiag

  StepRule step = StepRule::kRitz;
  double alpha0 = 1.0;       // first steplength for the BB family
  double const_alpha = 1.0;  // StepRule::kConstant
  StepBounds bounds;
  AbbMin1Config abb;

  int sweep_m = 3;
  SweepRecord sweep_record = SweepRecord::kPreStep;
  double disc_mask_eps = 1e-8;  // scaled by (1 + ||grad||_inf)

  LinesearchConfig ls;
  FeasibleSet set = FeasibleSet::kNonNegative;
  // Use the objective's exact ray restriction in the linesearch when it has
  // one; avoids the cancellation noise floor of f(x + t d) - f(x) near
  // convergence.
  bool use_line_model = true;
};

/// Stopping configuration. Thresholds drive first-passage bookkeeping for
/// both RRE and gap; *_stop values of 0 disable that criterion. Criteria
/// are evaluated in a fixed order: max_iters, gap, RRE, iterate difference.
struct StopRule {
  int max_iters = 5000;
  std::vector<double> thresholds = {1e-4, 1e-6, 1e-8};
  double gap_stop = 0.0;
  double rre_stop = 0.0;
  double step_tol = 0.0;  // relative ||x_k - x_{k-1}||
};

/// Optional ground truth for metrics: exact solution (RRE) and/or optimal
/// value (gap).
struct ProblemContext {
  Vec x_truth;
  double f_star = 0.0;
  bool has_f_star = false;
};

struct IterRecord {
  int iter = 0;
  double f = 0.0;
  double alpha = 0.0;   // steplength of the step that produced this iterate
  double lambda = 0.0;  // linesearch parameter of that step
  // NaN when the corresponding reference is unknown (gap may legitimately
  // go negative against an approximate f_star, so -1 is not a sentinel).
  double rre = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  double feas = 0.0;    // feasibility residual (0 for projected methods)
  double time_s = 0.0;
  int backtracks = 0;
};

struct SolverRun {
  std::vector<IterRecord> history;  // length = iterations + 1
  Vec x_final;
  std::string termination;
  std::vector<double> thresholds;
  std::vector<int> rre_first;  // first iterate index at each threshold, -1 never
  std::vector<int> gap_first;
  bool gap_absolute = false;
  bool ls_warning = false;
  int factorizations = 0;
  long long sweep_products = 0;
  long long rhs_products = 0;
  int iterations() const { return static_cast<int>(history.size()) - 1; }
};

/// Scaled gradient projection: x+ = x + lambda*(P(x - alpha*D*g) - x) with
/// the steplength and scaling rules of SgpOptions. Identity scaling gives
/// plain GP. The unit-disc set supports identity scaling only.
SolverRun sgp_run(const Objective& obj, const Vec& x0, const SgpOptions& opt,
                  const StopRule& stop, const ProblemContext& ctx = {});

/// Extrapolated gradient projection with fixed steplength 1/L:
///   xbar = x_k + eta_k (x_k - x_{k-1}),  x_{k+1} = P(xbar - (1/L) grad(xbar)).
SolverRun gp_extra_run(const Objective& obj, const Vec& x0, double lipschitz,
                       const StopRule& stop, const ProblemContext& ctx = {});

/// Extrapolation sequence: theta_k = 2/(k+2) with theta_0 = theta_1, and
/// eta_k = theta_k (1 - theta_{k-1}) / theta_{k-1} for k >= 1.
double gp_extra_theta(int k);
double gp_extra_eta(int k);

/// One multiplicative image-space reconstruction step:
/// x .* A'y ./ A'(Ax + b).
Vec isra_step(const LeastSquaresObjective& obj, const Vec& x);

/// One Richardson-Lucy step: (x ./ A'1) .* A'(y ./ (Ax + b)).
Vec rl_step(const KlObjective& obj, const Vec& x);

SolverRun isra_run(const LeastSquaresObjective& obj, const Vec& x0,
                   const StopRule& stop, const ProblemContext& ctx = {});
SolverRun rl_run(const KlObjective& obj, const Vec& x0, const StopRule& stop,
                 const ProblemContext& ctx = {});

struct ChambolleOptions {
  double tau = 0.24;
  // Apply the update exactly as commonly printed for this dual (divide the
  // step by the old pair norms); undefined at zero pairs and kept only for
  // comparison. The default semi-implicit form is the convergent scheme.
  bool literal_update = false;
};

/// Fixed-step semi-implicit dual denoising iteration. Iterates stay
/// feasible by construction; the primal is y - beta*div(p).
SolverRun chambolle_run(const RofDualObjective& obj, const Vec& p0,
                        const ChambolleOptions& opt, const StopRule& stop,
                        const ProblemContext& ctx = {});

/// Serialize a run history to CSV (iter, f, alpha, lambda, rre, gap, time_s).
void write_history_csv(const std::string& path, const SolverRun& run);

}  // namespace sgp
