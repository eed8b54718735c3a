#include "sgpkit/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "sgpkit/parallel.hpp"

namespace sgp {

namespace {

inline void grad_at(const Vec& x, ImageShape s, int i, int j, int n, Vec& g) {
  const int idx = s.at(i, j);
  const int ip = (i + 1 < s.h) ? i + 1 : 0;
  const int jp = (j + 1 < s.w) ? j + 1 : 0;
  g[idx] = x[s.at(ip, j)] - x[idx];
  g[n + idx] = x[s.at(i, jp)] - x[idx];
}

inline void div_at(const Vec& p, ImageShape s, int i, int j, int n,
                   Vec& out) {
  const int im = (i > 0) ? i - 1 : s.h - 1;
  const int jm = (j > 0) ? j - 1 : s.w - 1;
  out[s.at(i, j)] = p[s.at(i, j)] - p[s.at(im, j)] + p[n + s.at(i, j)] -
                    p[n + s.at(i, jm)];
}

inline double phi_at(const Vec& x, ImageShape s, int i, int j,
                     double delta2) {
  const int ip = (i + 1 < s.h) ? i + 1 : 0;
  const int jp = (j + 1 < s.w) ? j + 1 : 0;
  const double d1 = x[s.at(ip, j)] - x[s.at(i, j)];
  const double d2 = x[s.at(i, jp)] - x[s.at(i, j)];
  return std::sqrt(d1 * d1 + d2 * d2 + delta2);
}

inline void hs_split_at(const Vec& x, ImageShape s, int i, int j,
                        double delta2, Vec& u, Vec& v) {
  const int ip = (i + 1 < s.h) ? i + 1 : 0;
  const int jp = (j + 1 < s.w) ? j + 1 : 0;
  const int im = (i > 0) ? i - 1 : s.h - 1;
  const int jm = (j > 0) ? j - 1 : s.w - 1;
  const double inv_here = 1.0 / phi_at(x, s, i, j, delta2);
  const double inv_up = 1.0 / phi_at(x, s, im, j, delta2);
  const double inv_left = 1.0 / phi_at(x, s, i, jm, delta2);
  const int idx = s.at(i, j);
  u[idx] = (x[s.at(ip, j)] + x[s.at(i, jp)]) * inv_here +
           x[s.at(i, jm)] * inv_left + x[s.at(im, j)] * inv_up;
  v[idx] = x[idx] * (2.0 * inv_here + inv_left + inv_up);
}

inline void disc_at(Vec& p, int n, int i) {
  const double rho = std::sqrt(p[i] * p[i] + p[n + i] * p[n + i]);
  if (rho > 1.0) {
    p[i] /= rho;
    p[n + i] /= rho;
  }
}

}  // namespace

void grad_forward(const Vec& x, ImageShape shape, Vec& g) {
  const int n = shape.size();
  g.resize(2 * n);
  parallel_for(shape.h, [&](std::size_t i) {
    for (int j = 0; j < shape.w; ++j)
      grad_at(x, shape, static_cast<int>(i), j, n, g);
  });
}

void grad_forward_serial(const Vec& x, ImageShape shape, Vec& g) {
  const int n = shape.size();
  g.resize(2 * n);
  for (int i = 0; i < shape.h; ++i)
    for (int j = 0; j < shape.w; ++j) grad_at(x, shape, i, j, n, g);
}

void divergence(const Vec& p, ImageShape shape, Vec& out) {
  const int n = shape.size();
  out.resize(n);
  parallel_for(shape.h, [&](std::size_t i) {
    for (int j = 0; j < shape.w; ++j)
      div_at(p, shape, static_cast<int>(i), j, n, out);
  });
}

void divergence_serial(const Vec& p, ImageShape shape, Vec& out) {
  const int n = shape.size();
  out.resize(n);
  for (int i = 0; i < shape.h; ++i)
    for (int j = 0; j < shape.w; ++j) div_at(p, shape, i, j, n, out);
}

void edge_magnitude(const Vec& x, ImageShape shape, double delta, Vec& phi) {
  const double delta2 = delta * delta;
  phi.resize(shape.size());
  parallel_for(shape.h, [&](std::size_t i) {
    for (int j = 0; j < shape.w; ++j)
      phi[shape.at(static_cast<int>(i), j)] =
          phi_at(x, shape, static_cast<int>(i), j, delta2);
  });
}

void edge_magnitude_serial(const Vec& x, ImageShape shape, double delta,
                           Vec& phi) {
  const double delta2 = delta * delta;
  phi.resize(shape.size());
  for (int i = 0; i < shape.h; ++i)
    for (int j = 0; j < shape.w; ++j)
      phi[shape.at(i, j)] = phi_at(x, shape, i, j, delta2);
}

void hs_split(const Vec& x, ImageShape shape, double delta, Vec& u, Vec& v) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  const double delta2 = delta * delta;
  u.resize(shape.size());
  v.resize(shape.size());
  parallel_for(shape.h, [&](std::size_t i) {
    for (int j = 0; j < shape.w; ++j)
      hs_split_at(x, shape, static_cast<int>(i), j, delta2, u, v);
  });
}

void hs_split_serial(const Vec& x, ImageShape shape, double delta, Vec& u,
                     Vec& v) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  const double delta2 = delta * delta;
  u.resize(shape.size());
  v.resize(shape.size());
  for (int i = 0; i < shape.h; ++i)
    for (int j = 0; j < shape.w; ++j) hs_split_at(x, shape, i, j, delta2, u, v);
}

void project_discs(Vec& p, int n) {
  parallel_for(n, [&](std::size_t i) { disc_at(p, n, static_cast<int>(i)); });
}

void project_discs_serial(Vec& p, int n) {
  for (int i = 0; i < n; ++i) disc_at(p, n, i);
}

}  // namespace sgp
