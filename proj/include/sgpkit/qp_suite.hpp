#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sgpkit/image.hpp"
#include "sgpkit/rng.hpp"

namespace sgp {

/// Largest eigenvalue shared by the band and condition-number families:
/// sqrt(2)^19, giving cond(A) about 724 at xi_lo = 1.
extern const double kDefaultXiHi;

/// Eigenvalue layout for the random QP generator. Geometric is the
/// deterministic ladder sqrt(2)^0 .. sqrt(2)^(n-1); the band families fix
/// both endpoints and draw the interior uniformly from the lower, middle,
/// or upper third of (xi_lo, xi_hi); kCond draws the interior from the
/// whole interval so xi_lo alone controls the condition number.
struct SpectrumSpec {
  enum class Kind { kGeometric, kBandA1, kBandA2, kBandA3, kCond };
  Kind kind = Kind::kGeometric;
  double xi_lo = 1.0;
  double xi_hi = 0.0;  // 0 = kDefaultXiHi
};

/// Names: "geometric", "band-a1", "band-a2", "band-a3",
/// "cond:<xi_lo>[:<xi_hi>]".
SpectrumSpec spectrum_from_name(const std::string& name);
std::string spectrum_name(const SpectrumSpec& spec);

/// Ascending eigenvalue vector for the spec; draws interior values from rng
/// for the random families.
Vec make_spectrum(const SpectrumSpec& spec, int n, Rng& rng);

/// Box-constrained test problem with a known solution: A = Q diag(xi) Q^T,
/// x_star vanishing exactly on the active set, multipliers mu = 1 there,
/// and y = A x_star - mu so the KKT conditions hold by construction.
struct QpInstance {
  Mat a;
  Vec y;
  Vec x_star;
  Vec mu;
  std::vector<int> active_set;  // sorted indices
  Vec xi;
  SpectrumSpec spectrum;
  std::uint64_t seed = 0;
};

QpInstance generate_qp(int n, const SpectrumSpec& spec, int n_active,
                       std::uint64_t seed);

/// Worst componentwise violation over stationarity, sign conditions and
/// complementarity; 0 for a valid instance up to rounding.
double kkt_residual(const QpInstance& inst);

/// Objective/gradient pair in the reporting convention x'Ax - y'x with
/// gradient 2Ax - y. Solver runs use QuadraticObjective (the 1/2 form whose
/// constrained minimizer is exactly x_star); this is kept for tables that
/// quote the unhalved value.
std::pair<double, Vec> qp_value_grad(const QpInstance& inst, const Vec& x);

void save_qp(const std::string& path, const QpInstance& inst);
QpInstance load_qp(const std::string& path);

}  // namespace sgp
