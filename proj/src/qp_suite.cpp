#include "sgpkit/qp_suite.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sgp {

const double kDefaultXiHi = 512.0 * std::sqrt(2.0);  // sqrt(2)^19

SpectrumSpec spectrum_from_name(const std::string& name) {
  SpectrumSpec spec;
  if (name == "geometric") {
    spec.kind = SpectrumSpec::Kind::kGeometric;
    return spec;
  }
  if (name == "band-a1" || name == "band-a2" || name == "band-a3") {
    spec.kind = name == "band-a1"   ? SpectrumSpec::Kind::kBandA1
                : name == "band-a2" ? SpectrumSpec::Kind::kBandA2
                                    : SpectrumSpec::Kind::kBandA3;
    return spec;
  }
  if (name.rfind("cond:", 0) == 0) {
    spec.kind = SpectrumSpec::Kind::kCond;
    std::istringstream in(name.substr(5));
    std::string field;
    if (!std::getline(in, field, ':'))
      throw std::invalid_argument("bad spectrum spec: " + name);
    spec.xi_lo = std::stod(field);
    if (std::getline(in, field, ':')) spec.xi_hi = std::stod(field);
    return spec;
  }
  throw std::invalid_argument("unknown spectrum spec: " + name);
}

std::string spectrum_name(const SpectrumSpec& spec) {
  switch (spec.kind) {
    case SpectrumSpec::Kind::kGeometric: return "geometric";
    case SpectrumSpec::Kind::kBandA1: return "band-a1";
    case SpectrumSpec::Kind::kBandA2: return "band-a2";
    case SpectrumSpec::Kind::kBandA3: return "band-a3";
    case SpectrumSpec::Kind::kCond: {
      std::string out = "cond:" + format_double(spec.xi_lo);
      if (spec.xi_hi > 0.0) out += ":" + format_double(spec.xi_hi);
      return out;
    }
  }
  return "?";
}

Vec make_spectrum(const SpectrumSpec& spec, int n, Rng& rng) {
  if (n < 2) throw std::invalid_argument("spectrum needs n >= 2");
  Vec xi(n);
  if (spec.kind == SpectrumSpec::Kind::kGeometric) {
    const double ratio = std::sqrt(2.0);
    for (int i = 0; i < n; ++i) xi[i] = std::pow(ratio, i);
    return xi;
  }
  const double top = spec.xi_hi > 0.0 ? spec.xi_hi : kDefaultXiHi;
  if (!(spec.xi_lo > 0.0) || !(top > spec.xi_lo))
    throw std::invalid_argument("spectrum endpoints must satisfy 0 < lo < hi");
  double lo = spec.xi_lo, hi = top;
  switch (spec.kind) {
    case SpectrumSpec::Kind::kBandA1: hi = top / 3.0; break;
    case SpectrumSpec::Kind::kBandA2: lo = top / 3.0; hi = 2.0 * top / 3.0; break;
    case SpectrumSpec::Kind::kBandA3: lo = 2.0 * top / 3.0; break;
    case SpectrumSpec::Kind::kCond: break;
    case SpectrumSpec::Kind::kGeometric: break;  // handled above
  }
  if (!(lo < hi))
    throw std::invalid_argument("empty eigenvalue band");
  std::vector<double> mid(n - 2);
  for (double& v : mid) v = rng.uniform(lo, hi);
  std::sort(mid.begin(), mid.end());
  xi[0] = spec.xi_lo;
  for (int i = 0; i < n - 2; ++i) xi[i + 1] = mid[i];
  xi[n - 1] = top;
  return xi;
}

QpInstance generate_qp(int n, const SpectrumSpec& spec, int n_active,
                       std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("generate_qp: n must be >= 2");
  if (n_active < 0 || n_active > n)
    throw std::invalid_argument("generate_qp: n_active out of range");

  Rng rng(seed);
  QpInstance inst;
  inst.spectrum = spec;
  inst.seed = seed;
  inst.xi = make_spectrum(spec, n, rng);

  Mat gauss(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) gauss(i, j) = rng.gaussian();
  const Mat q = Eigen::HouseholderQR<Mat>(gauss).householderQ();
  inst.a = q * inst.xi.asDiagonal() * q.transpose();
  inst.a = ((inst.a + inst.a.transpose()) * 0.5).eval();

  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < n_active; ++i) {
    const int j = i + static_cast<int>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  inst.active_set.assign(idx.begin(), idx.begin() + n_active);
  std::sort(inst.active_set.begin(), inst.active_set.end());

  inst.x_star = Vec::Zero(n);
  inst.mu = Vec::Zero(n);
  std::vector<char> on_active(n, 0);
  for (int i : inst.active_set) on_active[i] = 1;
  for (int i = 0; i < n; ++i) {
    if (on_active[i]) {
      inst.mu[i] = 1.0;
    } else {
      double v;
      do {
        v = rng.uniform01();
      } while (v == 0.0);
      inst.x_star[i] = v;
    }
  }
  inst.y = inst.a * inst.x_star - inst.mu;
  return inst;
}

double kkt_residual(const QpInstance& inst) {
  const Vec stat = inst.a * inst.x_star - inst.y - inst.mu;
  double worst = stat.lpNorm<Eigen::Infinity>();
  worst = std::max(worst, -inst.mu.minCoeff());
  worst = std::max(worst, -inst.x_star.minCoeff());
  worst = std::max(worst, std::abs(inst.mu.dot(inst.x_star)));
  return worst;
}

std::pair<double, Vec> qp_value_grad(const QpInstance& inst, const Vec& x) {
  const Vec ax = inst.a * x;
  return {x.dot(ax) - inst.y.dot(x), 2.0 * ax - inst.y};
}

void save_qp(const std::string& path, const QpInstance& inst) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "qp 1\n";
  out << "seed " << inst.seed << '\n';
  out << "spectrum " << spectrum_name(inst.spectrum) << '\n';
  out << "active " << inst.active_set.size();
  for (int i : inst.active_set) out << ' ' << i;
  out << '\n';
  print_matrix(out, inst.a);
  print_matrix(out, inst.y);
  print_matrix(out, inst.x_star);
  print_matrix(out, inst.mu);
  print_matrix(out, inst.xi);
  if (!out) throw std::runtime_error("write failed: " + path);
}

QpInstance load_qp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string tag;
  int version = 0;
  in >> tag >> version;
  if (!in || tag != "qp" || version != 1)
    throw std::runtime_error("not a qp instance file: " + path);
  QpInstance inst;
  std::string key, name;
  in >> key >> inst.seed;
  if (key != "seed") throw std::runtime_error("bad qp file: " + path);
  in >> key >> name;
  if (key != "spectrum") throw std::runtime_error("bad qp file: " + path);
  inst.spectrum = spectrum_from_name(name);
  std::size_t n_active = 0;
  in >> key >> n_active;
  if (key != "active") throw std::runtime_error("bad qp file: " + path);
  inst.active_set.resize(n_active);
  for (std::size_t i = 0; i < n_active; ++i) in >> inst.active_set[i];
  inst.a = parse_matrix(in);
  inst.y = parse_matrix(in);
  inst.x_star = parse_matrix(in);
  inst.mu = parse_matrix(in);
  inst.xi = parse_matrix(in);
  if (!in) throw std::runtime_error("truncated qp file: " + path);
  return inst;
}

}  // namespace sgp
