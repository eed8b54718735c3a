#include "sgpkit/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "sgpkit/objectives.hpp"
#include "sgpkit/psf.hpp"
#include "sgpkit/qp_suite.hpp"
#include "sgpkit/rng.hpp"

namespace sgp {

Vec synthesize_data(const Vec& truth, const BlurOperator& op,
                    const NoiseSpec& noise, double background,
                    std::uint64_t seed) {
  if (truth.size() && truth.minCoeff() < 0.0)
    throw std::invalid_argument("synthesize_data: truth must be non-negative");
  if (background < 0.0)
    throw std::invalid_argument("synthesize_data: negative background");
  Vec y = op.apply(truth);
  y.array() += background;
  Rng rng(seed);
  switch (noise.kind) {
    case NoiseSpec::Kind::kNone:
      break;
    case NoiseSpec::Kind::kGaussian: {
      if (noise.variance < 0.0)
        throw std::invalid_argument("synthesize_data: negative variance");
      const double sd = std::sqrt(noise.variance);
      for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += sd * rng.gaussian();
      break;
    }
    case NoiseSpec::Kind::kPoisson: {
      // the convolution of a non-negative image is non-negative up to FFT
      // rounding; absorb the wiggle but reject real negativity
      const double tol = 1e-9 * (1.0 + y.cwiseAbs().maxCoeff());
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        double mean = y[i];
        if (mean < 0.0) {
          if (mean < -tol)
            throw std::invalid_argument("synthesize_data: Poisson mean < 0");
          mean = 0.0;
        }
        y[i] = static_cast<double>(rng.poisson(mean));
      }
      break;
    }
  }
  return y;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int to_int(const std::string& v) { return std::stoi(v); }
double to_real(const std::string& v) { return std::stod(v); }

std::vector<double> to_real_list(const std::string& v) {
  std::vector<double> out;
  std::istringstream in(v);
  std::string field;
  while (std::getline(in, field, ',')) out.push_back(std::stod(field));
  return out;
}

bool to_flag(const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw std::invalid_argument("expected a boolean, got: " + v);
}

void apply_global_key(ExperimentConfig& cfg, const std::string& key,
                      const std::string& value) {
  if (key == "problem") cfg.problem = value;
  else if (key == "out") cfg.out_dir = value;
  else if (key == "seed") cfg.seed = std::stoull(value);
  else if (key == "max_iters") cfg.stop.max_iters = to_int(value);
  else if (key == "thresholds") cfg.stop.thresholds = to_real_list(value);
  else if (key == "gap_stop") cfg.stop.gap_stop = to_real(value);
  else if (key == "rre_stop") cfg.stop.rre_stop = to_real(value);
  else if (key == "step_tol") cfg.stop.step_tol = to_real(value);
  else if (key == "n") cfg.qp_n = to_int(value);
  else if (key == "spectrum") cfg.qp_spectrum = value;
  else if (key == "n_active") cfg.qp_active = to_int(value);
  else if (key == "x0") cfg.qp_x0 = to_real(value);
  else if (key == "width") cfg.width = to_int(value);
  else if (key == "height") cfg.height = to_int(value);
  else if (key == "image") cfg.image_path = value;
  else if (key == "scene_floor") cfg.scene_floor = to_real(value);
  else if (key == "scene_peak") cfg.scene_peak = to_real(value);
  else if (key == "psf") cfg.psf_path = value;
  else if (key == "psf_sigma") cfg.psf_sigma = to_real(value);
  else if (key == "noise") {
    if (value == "none") cfg.noise.kind = NoiseSpec::Kind::kNone;
    else if (value == "gaussian") cfg.noise.kind = NoiseSpec::Kind::kGaussian;
    else if (value == "poisson") cfg.noise.kind = NoiseSpec::Kind::kPoisson;
    else throw std::invalid_argument("unknown noise model: " + value);
  } else if (key == "variance") cfg.noise.variance = to_real(value);
  else if (key == "background") cfg.background = to_real(value);
  else if (key == "beta") cfg.beta = to_real(value);
  else if (key == "delta") cfg.delta = to_real(value);
  else if (key == "reference") cfg.reference = value;
  else if (key == "reference_iters") cfg.reference_iters = to_int(value);
  else throw std::invalid_argument("unknown config key: " + key);
}

void apply_solver_key(SolverSpec& spec, const std::string& key,
                      const std::string& value) {
  if (key == "kind") spec.kind = value;
  else if (key == "step") spec.opt.step = step_rule_from_name(value);
  else if (key == "scaling") spec.opt.scaling = scaling_rule_from_name(value);
  else if (key == "memory") spec.opt.ls.memory = to_int(value);
  else if (key == "sweep_m") spec.opt.sweep_m = to_int(value);
  else if (key == "record") {
    if (value == "pre") spec.opt.sweep_record = SweepRecord::kPreStep;
    else if (value == "post") spec.opt.sweep_record = SweepRecord::kPostStep;
    else throw std::invalid_argument("record must be pre or post");
  } else if (key == "alpha0") spec.opt.alpha0 = to_real(value);
  else if (key == "const_alpha") spec.opt.const_alpha = to_real(value);
  else if (key == "bound_lo") spec.opt.bounds.alpha_min = to_real(value);
  else if (key == "bound_hi") spec.opt.bounds.alpha_max = to_real(value);
  else if (key == "warmup") spec.opt.abb.warmup = to_int(value);
  else if (key == "tau0") spec.opt.abb.tau0 = to_real(value);
  else if (key == "line_model") spec.opt.use_line_model = to_flag(value);
  else if (key == "disc_eps") spec.opt.disc_mask_eps = to_real(value);
  else if (key == "gamma") spec.opt.ls.gamma = to_real(value);
  else if (key == "max_backtracks") spec.opt.ls.max_backtracks = to_int(value);
  else if (key == "tau") spec.chambolle.tau = to_real(value);
  else if (key == "literal") spec.chambolle.literal_update = to_flag(value);
  else throw std::invalid_argument("unknown solver key: " + key);
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  ExperimentConfig cfg;
  SolverSpec* current = nullptr;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::size_t hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    try {
      if (line.front() == '[') {
        if (line.back() != ']')
          throw std::invalid_argument("unterminated section header");
        std::istringstream head(line.substr(1, line.size() - 2));
        std::string word, label;
        head >> word >> label;
        if (word != "solver" || label.empty())
          throw std::invalid_argument("expected [solver LABEL]");
        cfg.solvers.emplace_back();
        current = &cfg.solvers.back();
        current->label = label;
        continue;
      }
      const std::size_t split = line.find_first_of(" \t");
      if (split == std::string::npos)
        throw std::invalid_argument("key without value: " + line);
      const std::string key = line.substr(0, split);
      const std::string value = trim(line.substr(split + 1));
      if (current) apply_solver_key(*current, key, value);
      else apply_global_key(cfg, key, value);
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " +
                               e.what());
    }
  }
  return cfg;
}

namespace {

struct Problem {
  std::shared_ptr<Objective> objective;
  std::shared_ptr<LeastSquaresObjective> ls;
  std::shared_ptr<KlObjective> kl;
  std::shared_ptr<RofDualObjective> rof;
  Vec x0;
  ProblemContext ctx;
  FeasibleSet set = FeasibleSet::kNonNegative;
  Vec hess_diag;
  double lipschitz = 0.0;
  ScalingRule reference_scaling = ScalingRule::kIdentity;
  std::string canonical;
};

Vec load_image(const std::string& path, ImageShape& shape) {
  const Mat m = read_matrix(path);
  shape = ImageShape{static_cast<int>(m.rows()), static_cast<int>(m.cols())};
  return to_vector(m);
}

Problem build_problem(const ExperimentConfig& cfg) {
  Problem pr;
  std::ostringstream key;
  key << "problem=" << cfg.problem << ";seed=" << cfg.seed;

  if (cfg.problem == "qp") {
    const QpInstance inst = generate_qp(
        cfg.qp_n, spectrum_from_name(cfg.qp_spectrum), cfg.qp_active, cfg.seed);
    auto obj = std::make_shared<QuadraticObjective>(inst.a, inst.y);
    pr.hess_diag = obj->hessian_diag();
    pr.lipschitz = inst.xi.maxCoeff();
    pr.ctx.x_truth = inst.x_star;
    pr.ctx.f_star =
        0.5 * inst.x_star.dot(inst.a * inst.x_star) - inst.y.dot(inst.x_star);
    pr.ctx.has_f_star = true;
    pr.x0 = Vec::Constant(cfg.qp_n, cfg.qp_x0);
    pr.objective = obj;
    key << ";n=" << cfg.qp_n << ";spectrum=" << cfg.qp_spectrum
        << ";n_active=" << cfg.qp_active << ";x0=" << cfg.qp_x0;
    pr.canonical = key.str();
    return pr;
  }

  ImageShape shape{cfg.height, cfg.width};
  Vec truth;
  if (cfg.image_path.empty()) {
    truth = shapes_scene(shape, cfg.scene_floor, cfg.scene_peak);
    key << ";scene=" << cfg.height << "x" << cfg.width << ":"
        << cfg.scene_floor << ":" << cfg.scene_peak;
  } else {
    truth = load_image(cfg.image_path, shape);
    key << ";image=" << cfg.image_path;
  }
  const int n = shape.size();

  if (cfg.problem == "rof") {
    if (!(cfg.beta > 0.0))
      throw std::invalid_argument("rof requires beta > 0");
    if (cfg.noise.kind == NoiseSpec::Kind::kPoisson)
      throw std::invalid_argument("rof expects additive noise");
    Vec y = truth;
    if (cfg.noise.kind == NoiseSpec::Kind::kGaussian) {
      Rng rng(cfg.seed);
      const double sd = std::sqrt(cfg.noise.variance);
      for (int i = 0; i < n; ++i) y[i] += sd * rng.gaussian();
    }
    auto rof = std::make_shared<RofDualObjective>(y, cfg.beta, shape);
    pr.objective = rof;
    pr.rof = rof;
    pr.x0 = Vec::Zero(2 * n);
    pr.set = FeasibleSet::kUnitDiscs;
    key << ";noise=" << static_cast<int>(cfg.noise.kind)
        << ";variance=" << cfg.noise.variance << ";beta=" << cfg.beta;
    pr.canonical = key.str();
    return pr;
  }

  Vec kernel;
  if (cfg.psf_path.empty()) {
    kernel = gaussian_psf(shape, cfg.psf_sigma);
    key << ";psf=gauss:" << cfg.psf_sigma;
  } else {
    ImageShape psf_shape;
    kernel = psf_normalize(load_image(cfg.psf_path, psf_shape));
    if (psf_shape.h != shape.h || psf_shape.w != shape.w)
      throw std::invalid_argument("PSF and image sizes differ");
    key << ";psf=" << cfg.psf_path;
  }
  auto op = std::make_shared<BlurOperator>(kernel, shape);
  const Vec y = synthesize_data(truth, *op, cfg.noise, cfg.background,
                                cfg.seed);
  key << ";noise=" << static_cast<int>(cfg.noise.kind)
      << ";variance=" << cfg.noise.variance
      << ";background=" << cfg.background;

  const Vec b = Vec::Constant(n, cfg.background);
  pr.ctx.x_truth = truth;
  pr.x0 = Vec::Constant(n, std::max(y.mean() - cfg.background, 1e-3));

  if (cfg.problem == "ls-deblur") {
    auto obj = std::make_shared<LeastSquaresObjective>(op, y, b);
    pr.lipschitz = obj->lipschitz();
    pr.objective = obj;
    pr.ls = obj;
    pr.reference_scaling = ScalingRule::kSplit;
  } else if (cfg.problem == "kl-deblur") {
    auto obj = std::make_shared<KlObjective>(op, y, b);
    pr.objective = obj;
    pr.kl = obj;
    pr.reference_scaling = ScalingRule::kSplit;
  } else if (cfg.problem == "kl-hs") {
    if (!(cfg.beta > 0.0))
      throw std::invalid_argument("kl-hs requires beta > 0");
    auto data = std::make_shared<KlObjective>(op, y, b);
    auto reg = std::make_shared<HsRegularizer>(shape, cfg.delta);
    pr.objective = std::make_shared<CompositeObjective>(data, reg, cfg.beta);
    pr.reference_scaling = ScalingRule::kSplit;
    key << ";beta=" << cfg.beta << ";delta=" << cfg.delta;
  } else {
    throw std::invalid_argument("unknown problem: " + cfg.problem);
  }
  pr.canonical = key.str();
  return pr;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void attach_reference(const ExperimentConfig& cfg, Problem& pr) {
  if (pr.ctx.has_f_star || cfg.reference == "none") return;
  if (cfg.reference != "auto") {
    pr.ctx.f_star = std::stod(cfg.reference);
    pr.ctx.has_f_star = true;
    return;
  }
  const std::string key =
      pr.canonical + ";reference_iters=" + std::to_string(cfg.reference_iters);
  std::ostringstream name;
  name << "reference-" << std::hex << fnv1a(key) << ".txt";
  const std::filesystem::path path =
      std::filesystem::path(cfg.out_dir) / name.str();

  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    std::string stored;
    std::getline(in, stored);
    double f_star = 0.0;
    if (in >> f_star && stored == key) {
      pr.ctx.f_star = f_star;
      pr.ctx.has_f_star = true;
      return;
    }
  }
  SgpOptions opt;
  opt.step = StepRule::kRitz;
  opt.sweep_record = SweepRecord::kPostStep;
  opt.scaling = pr.reference_scaling;
  opt.ls.memory = 1;
  opt.set = pr.set;
  StopRule stop;
  stop.max_iters = cfg.reference_iters;
  stop.thresholds.clear();
  stop.step_tol = 1e-15;
  const SolverRun run = sgp_run(*pr.objective, pr.x0, opt, stop, {});
  double f_star = run.history.front().f;
  for (const IterRecord& r : run.history) f_star = std::min(f_star, r.f);
  std::ofstream out(path);
  out << key << '\n' << format_double(f_star) << '\n';
  pr.ctx.f_star = f_star;
  pr.ctx.has_f_star = true;
}

SolverRun dispatch(const SolverSpec& spec, const ExperimentConfig& cfg,
                   const Problem& pr) {
  if (spec.kind == "sgp") {
    SgpOptions opt = spec.opt;
    opt.set = pr.set;
    if (opt.scaling == ScalingRule::kInvHessDiag) {
      if (!pr.hess_diag.size())
        throw std::runtime_error("no Hessian diagonal for this problem");
      opt.hess_diag = pr.hess_diag;
    }
    return sgp_run(*pr.objective, pr.x0, opt, cfg.stop, pr.ctx);
  }
  if (spec.kind == "gp-extra") {
    if (!(pr.lipschitz > 0.0))
      throw std::runtime_error("no Lipschitz constant for this problem");
    return gp_extra_run(*pr.objective, pr.x0, pr.lipschitz, cfg.stop, pr.ctx);
  }
  if (spec.kind == "isra") {
    if (!pr.ls)
      throw std::runtime_error("isra applies to the ls-deblur problem");
    return isra_run(*pr.ls, pr.x0, cfg.stop, pr.ctx);
  }
  if (spec.kind == "rl") {
    if (!pr.kl)
      throw std::runtime_error("rl applies to the kl-deblur problem");
    return rl_run(*pr.kl, pr.x0, cfg.stop, pr.ctx);
  }
  if (spec.kind == "chambolle") {
    if (!pr.rof)
      throw std::runtime_error("chambolle applies to the rof problem");
    return chambolle_run(*pr.rof, pr.x0, spec.chambolle, cfg.stop, pr.ctx);
  }
  throw std::invalid_argument("unknown solver kind: " + spec.kind);
}

std::string sanitize_csv(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n') c = ';';
  return s;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.problem.empty())
    throw std::invalid_argument("config has no problem");
  if (cfg.solvers.empty())
    throw std::invalid_argument("config has no solvers");
  std::filesystem::create_directories(cfg.out_dir);

  Problem pr = build_problem(cfg);
  attach_reference(cfg, pr);

  ExperimentResult result;
  result.thresholds = cfg.stop.thresholds;
  result.f_star = pr.ctx.f_star;
  result.has_f_star = pr.ctx.has_f_star;
  const std::size_t n_thr = cfg.stop.thresholds.size();

  for (const SolverSpec& spec : cfg.solvers) {
    SolverSummary row;
    row.label = spec.label;
    row.rre_first.assign(n_thr, -1);
    row.gap_first.assign(n_thr, -1);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const SolverRun run = dispatch(spec, cfg, pr);
      row.wall_s = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - t0).count();
      row.iterations = run.iterations();
      row.termination = run.termination;
      row.f_final = run.history.back().f;
      row.rre_first = run.rre_first;
      row.gap_first = run.gap_first;
      for (const IterRecord& r : run.history) {
        if (!std::isnan(r.rre) &&
            (row.min_rre_iter < 0 || r.rre < row.min_rre)) {
          row.min_rre = r.rre;
          row.min_rre_iter = r.iter;
        }
        if (!std::isnan(r.gap) && r.gap < 0.0) row.gap_negative_seen = true;
      }
      write_history_csv(
          (std::filesystem::path(cfg.out_dir) / (spec.label + "_trace.csv"))
              .string(),
          run);
      if (row.gap_negative_seen)
        std::fprintf(stderr,
                     "warning: %s dips below the reference optimum; the "
                     "reference is approximate\n",
                     spec.label.c_str());
    } catch (const std::exception& e) {
      row.wall_s = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - t0).count();
      row.termination = "error";
      row.error = e.what();
    }
    result.rows.push_back(std::move(row));
  }

  const std::filesystem::path out_dir(cfg.out_dir);
  result.summary_path = (out_dir / "summary.csv").string();
  result.timings_path = (out_dir / "timings.csv").string();

  // summary.csv carries no wall times so reruns are byte-comparable
  std::ofstream summary(result.summary_path);
  summary << "solver,iterations,termination,f_final,min_rre,min_rre_iter";
  for (double t : cfg.stop.thresholds) summary << ",rre_le_" << format_double(t);
  for (double t : cfg.stop.thresholds) summary << ",gap_le_" << format_double(t);
  summary << ",error\n";
  for (const SolverSummary& row : result.rows) {
    summary << row.label << ',' << row.iterations << ','
            << sanitize_csv(row.termination) << ',' << format_double(row.f_final)
            << ',' << format_double(row.min_rre) << ',' << row.min_rre_iter;
    for (std::size_t i = 0; i < n_thr; ++i) summary << ',' << row.rre_first[i];
    for (std::size_t i = 0; i < n_thr; ++i) summary << ',' << row.gap_first[i];
    summary << ',' << sanitize_csv(row.error) << '\n';
  }
  summary.close();

  std::ofstream timings(result.timings_path);
  timings << "solver,wall_s\n";
  for (const SolverSummary& row : result.rows)
    timings << row.label << ',' << format_double(row.wall_s) << '\n';

  return result;
}

std::string format_report(const std::string& out_dir) {
  const std::filesystem::path path =
      std::filesystem::path(out_dir) / "summary.csv";
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::vector<std::string>> table;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) row.push_back(field);
    if (!row.empty()) table.push_back(std::move(row));
  }
  if (table.empty()) return "";
  std::vector<std::size_t> width;
  for (const auto& row : table) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i)
      width[i] = std::max(width[i], row[i].size());
  }
  std::ostringstream out;
  for (const auto& row : table) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << "  ";
      out << row[i];
      for (std::size_t pad = row[i].size(); pad < width[i]; ++pad) out << ' ';
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace sgp
