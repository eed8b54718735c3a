#pragma once

#include <deque>
#include <vector>

#include "sgpkit/image.hpp"

namespace sgp {

struct StepBounds {
  double alpha_min = 1e-10;
  double alpha_max = 1e5;
};

/// Safeguard: non-finite or non-positive raw values collapse to alpha_max,
/// everything else is clamped into [alpha_min, alpha_max].
double clamp_steplength(double raw, const StepBounds& b);

/// Scaled Barzilai-Borwein rules for a diagonal scaling d (the diagonal of
/// D). s = x_k - x_{k-1}, z = grad_k - grad_{k-1}.
///   bb1 = s'D^{-2}s / s'D^{-1}z      bb2 = s'Dz / z'D^2 z
double bb1(const Vec& s, const Vec& z, const Vec& d, const StepBounds& b);
double bb2(const Vec& s, const Vec& z, const Vec& d, const StepBounds& b);

struct AbbMin1Config {
  double tau0 = 0.5;       // initial switching threshold
  double tau_down = 0.9;   // applied when the bb2 branch fires
  double tau_up = 1.1;     // applied when the bb1 branch fires
  int history = 3;         // stored bb2 values for the min
  int warmup = 20;         // leading selections forced to bb2
};

/// Adaptive alternation: during warmup return bb2; afterwards return the
/// minimum of recent bb2 values when bb2/bb1 drops below tau (shrinking
/// tau), else bb1 (growing tau).
class AbbMin1State {
 public:
  explicit AbbMin1State(AbbMin1Config cfg = {}, StepBounds bounds = {});
  double select(const Vec& s, const Vec& z, const Vec& d);

 private:
  AbbMin1Config cfg_;
  StepBounds bounds_;
  std::deque<double> bb2_hist_;
  double tau_;
  int count_ = 0;
};

struct SweepConfig {
  int m = 3;            // sweep length / stored back gradients
  double alpha0 = 1.0;  // bootstrap steplength before the first sweep
  StepBounds bounds;
};

/// Limited-memory Ritz steplength engine. Stores a rolling window of m
/// scaled, masked gradients; each factorization projects the Hessian onto
/// their span through the steplength recurrence alone (no Hessian products)
/// and queues the reciprocals of the resulting Ritz values as the next m
/// steplengths, consumed in increasing order.
class RitzSweep {
 public:
  explicit RitzSweep(SweepConfig cfg = {});

  /// sqrt(d) .* g with entries zeroed where active_mask is set. Counted as
  /// one vector-vector product in the sweep accounting.
  Vec make_column(const Vec& g, const Vec& d,
                  const std::vector<unsigned char>& active_mask);

  /// Append a column and the steplength aligned with it; evicts the oldest
  /// column once m are stored.
  void push(const Vec& column, double alpha_used);

  /// Pop the next queued steplength. An empty queue triggers a
  /// factorization when m columns are stored (gbar supplies the trailing
  /// column of the projected matrix); otherwise the last returned
  /// steplength (initially alpha0) is repeated.
  double next_alpha(const Vec& gbar);

  /// Eigenvalues (ascending) of the symmetrized projected matrix built from
  /// the stored columns; empty when the column set is degenerate. On rank
  /// deficiency the oldest columns are dropped and the factorization
  /// retried. phi/phi_sym expose the projected matrix for tests.
  std::vector<double> ritz_values(const Vec& gbar, Mat* phi = nullptr,
                                  Mat* phi_sym = nullptr);

  int stored_columns() const { return static_cast<int>(cols_.size()); }
  int queued() const { return static_cast<int>(queue_.size()); }
  double fallback() const { return fallback_; }
  int factorizations() const { return factorizations_; }

  /// Products in the sweep accounting: column scalings + Gram entries.
  long long sweep_products() const { return col_products_ + gram_products_; }
  /// Right-hand-side dot products (projection of the trailing gradient),
  /// tracked separately from the sweep accounting.
  long long rhs_products() const { return rhs_products_; }

 private:
  SweepConfig cfg_;
  std::deque<Vec> cols_;
  std::deque<double> alphas_;
  std::deque<double> queue_;
  double fallback_;
  int factorizations_ = 0;
  long long col_products_ = 0;
  long long gram_products_ = 0;
  long long rhs_products_ = 0;
};

}  // namespace sgp
