#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgpkit/blur_operator.hpp"
#include "sgpkit/image.hpp"
#include "sgpkit/solvers.hpp"

namespace sgp {

struct NoiseSpec {
  enum class Kind { kNone, kGaussian, kPoisson };
  Kind kind = Kind::kNone;
  double variance = 1.0;  // Gaussian only
};

/// Blur the truth, add the constant background, then apply the noise model.
/// Gaussian noise may push pixels negative; they are kept as-is. Poisson
/// draws use the blurred-plus-background value as the per-pixel mean and
/// reject genuinely negative means.
Vec synthesize_data(const Vec& truth, const BlurOperator& op,
                    const NoiseSpec& noise, double background,
                    std::uint64_t seed);

/// One row of the solver matrix: a label plus everything needed to run it.
struct SolverSpec {
  std::string label;
  std::string kind = "sgp";  // sgp | gp-extra | isra | rl | chambolle
  SgpOptions opt;
  ChambolleOptions chambolle;
};

struct ExperimentConfig {
  std::string problem;  // qp | ls-deblur | kl-deblur | kl-hs | rof
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  StopRule stop;

  // qp problems
  int qp_n = 20;
  std::string qp_spectrum = "geometric";
  int qp_active = 8;
  double qp_x0 = 0.5;  // starting point, componentwise

  // imaging problems
  int width = 64;
  int height = 64;
  std::string image_path;  // ground truth file; empty = built-in scene
  double scene_floor = 0.0;
  double scene_peak = 1000.0;
  std::string psf_path;  // empty = Gaussian kernel
  double psf_sigma = 1.3;
  NoiseSpec noise;
  double background = 0.0;
  double beta = 0.0;   // regularization weight (kl-hs) or dual weight (rof)
  double delta = 0.1;  // edge-smoothing parameter (kl-hs)

  // Optimal-value reference for gap metrics: "auto" runs a long designated
  // solve once and caches it next to the outputs, "none" disables gap
  // metrics, a number is used verbatim.
  std::string reference = "auto";
  int reference_iters = 20000;

  std::vector<SolverSpec> solvers;
};

/// Parse the plain-text config format: global `key value` lines plus one
/// `[solver LABEL]` section per solver. See README for the schema.
ExperimentConfig load_config(const std::string& path);

struct SolverSummary {
  std::string label;
  int iterations = 0;
  std::string termination;
  double f_final = 0.0;
  double min_rre = -1.0;
  int min_rre_iter = -1;
  std::vector<int> rre_first;  // first iterate at each threshold, -1 never
  std::vector<int> gap_first;
  bool gap_negative_seen = false;
  double wall_s = 0.0;   // timings.csv only, never in summary.csv
  std::string error;     // non-empty when the solver failed; run continues
};

struct ExperimentResult {
  std::vector<double> thresholds;
  std::vector<SolverSummary> rows;
  double f_star = 0.0;
  bool has_f_star = false;
  std::string summary_path;
  std::string timings_path;
};

/// Run every configured solver on the configured problem. Writes one trace
/// CSV per solver, summary.csv (deterministic: no wall times), and
/// timings.csv. Solver failures become error rows; the run continues.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Render <out_dir>/summary.csv as an aligned text table.
std::string format_report(const std::string& out_dir);

}  // namespace sgp
