#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sgpkit/experiment.hpp"
#include "sgpkit/psf.hpp"
#include "sgpkit/qp_suite.hpp"

namespace {

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::istringstream in(csv);
  std::string field;
  while (std::getline(in, field, ',')) out.push_back(std::stod(field));
  return out;
}

std::vector<std::string> split_names(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream in(csv);
  std::string field;
  while (std::getline(in, field, ',')) out.push_back(field);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"first-order solvers for non-negative and dual-constrained "
               "problems: QP generator, data synthesis, experiment runner"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen-qp",
                                 "generate a random box-constrained QP with "
                                 "a known solution");
  int gen_n = 20, gen_active = 8;
  std::uint64_t gen_seed = 0;
  std::string gen_spectrum = "geometric", gen_out;
  gen->add_option("--n", gen_n, "problem size");
  gen->add_option("--spectrum", gen_spectrum,
                  "geometric | band-a1 | band-a2 | band-a3 | cond:LO[:HI]");
  gen->add_option("--n-active", gen_active, "active constraints at the solution");
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--out", gen_out, "output instance file")->required();

  auto* synth = app.add_subcommand("synth",
                                   "blur a scene and add noise; writes "
                                   "truth/psf/data matrices");
  int sy_w = 64, sy_h = 64;
  double sy_sigma = 1.3, sy_variance = 1.0, sy_background = 0.0;
  double sy_floor = 0.0, sy_peak = 1000.0;
  std::uint64_t sy_seed = 0;
  std::string sy_image, sy_psf, sy_noise = "gaussian", sy_out;
  synth->add_option("--width", sy_w);
  synth->add_option("--height", sy_h);
  synth->add_option("--image", sy_image, "ground-truth matrix file (default: built-in scene)");
  synth->add_option("--scene-floor", sy_floor);
  synth->add_option("--scene-peak", sy_peak);
  synth->add_option("--psf", sy_psf, "kernel matrix file (default: Gaussian)");
  synth->add_option("--psf-sigma", sy_sigma);
  synth->add_option("--noise", sy_noise, "none | gaussian | poisson");
  synth->add_option("--variance", sy_variance, "Gaussian noise variance");
  synth->add_option("--background", sy_background);
  synth->add_option("--seed", sy_seed);
  synth->add_option("--out", sy_out, "output directory")->required();

  auto* run = app.add_subcommand("run", "run an experiment config");
  std::string run_config, run_out, run_solver, run_threshold;
  std::uint64_t run_seed = 0;
  run->add_option("--config", run_config, "config file")->required();
  auto* run_seed_opt = run->add_option("--seed", run_seed, "override config seed");
  run->add_option("--out", run_out, "override output directory");
  run->add_option("--solver", run_solver, "run only these labels (comma list)");
  run->add_option("--threshold", run_threshold,
                  "override first-passage thresholds (comma list)");

  auto* rep = app.add_subcommand("report", "format summary.csv as a table");
  std::string rep_out = "out";
  rep->add_option("--out", rep_out, "experiment output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const sgp::QpInstance inst = sgp::generate_qp(
          gen_n, sgp::spectrum_from_name(gen_spectrum), gen_active, gen_seed);
      sgp::save_qp(gen_out, inst);
      std::cout << "wrote " << gen_out << " (n=" << gen_n
                << ", cond=" << sgp::format_double(inst.xi.maxCoeff() /
                                                   inst.xi.minCoeff())
                << ")\n";
      return 0;
    }

    if (synth->parsed()) {
      sgp::ImageShape shape{sy_h, sy_w};
      sgp::Vec truth;
      if (sy_image.empty()) {
        truth = sgp::shapes_scene(shape, sy_floor, sy_peak);
      } else {
        const sgp::Mat m = sgp::read_matrix(sy_image);
        shape = sgp::ImageShape{static_cast<int>(m.rows()),
                                static_cast<int>(m.cols())};
        truth = sgp::to_vector(m);
      }
      sgp::Vec kernel;
      if (sy_psf.empty()) {
        kernel = sgp::gaussian_psf(shape, sy_sigma);
      } else {
        kernel = sgp::psf_normalize(sgp::to_vector(sgp::read_matrix(sy_psf)));
      }
      sgp::NoiseSpec noise;
      if (sy_noise == "none") noise.kind = sgp::NoiseSpec::Kind::kNone;
      else if (sy_noise == "gaussian") noise.kind = sgp::NoiseSpec::Kind::kGaussian;
      else if (sy_noise == "poisson") noise.kind = sgp::NoiseSpec::Kind::kPoisson;
      else throw std::invalid_argument("unknown noise model: " + sy_noise);
      noise.variance = sy_variance;

      const sgp::BlurOperator op(kernel, shape);
      const sgp::Vec data =
          sgp::synthesize_data(truth, op, noise, sy_background, sy_seed);

      std::filesystem::create_directories(sy_out);
      const std::filesystem::path dir(sy_out);
      sgp::write_matrix((dir / "truth.txt").string(),
                        sgp::to_matrix(truth, shape));
      sgp::write_matrix((dir / "psf.txt").string(),
                        sgp::to_matrix(kernel, shape));
      sgp::write_matrix((dir / "data.txt").string(),
                        sgp::to_matrix(data, shape));
      std::cout << "wrote truth.txt, psf.txt, data.txt in " << sy_out << "\n";
      return 0;
    }

    if (run->parsed()) {
      sgp::ExperimentConfig cfg = sgp::load_config(run_config);
      if (run_seed_opt->count()) cfg.seed = run_seed;
      if (!run_out.empty()) cfg.out_dir = run_out;
      if (!run_threshold.empty())
        cfg.stop.thresholds = parse_list(run_threshold);
      if (!run_solver.empty()) {
        const std::vector<std::string> keep = split_names(run_solver);
        std::vector<sgp::SolverSpec> picked;
        for (const std::string& name : keep) {
          bool found = false;
          for (const sgp::SolverSpec& spec : cfg.solvers)
            if (spec.label == name) {
              picked.push_back(spec);
              found = true;
              break;
            }
          if (!found)
            throw std::invalid_argument("no solver labeled " + name +
                                        " in the config");
        }
        cfg.solvers = std::move(picked);
      }
      const sgp::ExperimentResult result = sgp::run_experiment(cfg);
      std::cout << sgp::format_report(cfg.out_dir);
      for (const sgp::SolverSummary& row : result.rows)
        if (!row.error.empty())
          std::cerr << "solver " << row.label << " failed: " << row.error
                    << "\n";
      return 0;
    }

    if (rep->parsed()) {
      std::cout << sgp::format_report(rep_out);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
