#include "sgpkit/psf.hpp"

#include <cmath>
#include <stdexcept>

namespace sgp {

Vec psf_normalize(const Vec& kernel) {
  const double s = kernel.sum();
  if (!(s > 0.0)) throw std::invalid_argument("degenerate PSF");
  return kernel / s;
}

Vec gaussian_psf(ImageShape shape, double sigma) {
  Vec k(shape.size());
  const double ci = (shape.h - 1) / 2.0;
  const double cj = (shape.w - 1) / 2.0;
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (int i = 0; i < shape.h; ++i)
    for (int j = 0; j < shape.w; ++j) {
      const double di = i - ci, dj = j - cj;
      k[shape.at(i, j)] = std::exp(-(di * di + dj * dj) * inv);
    }
  return psf_normalize(k);
}

Vec disc_psf(ImageShape shape, double radius) {
  Vec k(shape.size());
  const double ci = (shape.h - 1) / 2.0;
  const double cj = (shape.w - 1) / 2.0;
  for (int i = 0; i < shape.h; ++i)
    for (int j = 0; j < shape.w; ++j) {
      const double di = i - ci, dj = j - cj;
      k[shape.at(i, j)] = (di * di + dj * dj <= radius * radius) ? 1.0 : 0.0;
    }
  return psf_normalize(k);
}

Vec shapes_scene(ImageShape shape, double floor_level, double peak) {
  Vec img = Vec::Constant(shape.size(), floor_level);
  const int h = shape.h, w = shape.w;
  auto box = [&](double i0, double i1, double j0, double j1, double level) {
    for (int i = static_cast<int>(i0 * h); i < static_cast<int>(i1 * h); ++i)
      for (int j = static_cast<int>(j0 * w); j < static_cast<int>(j1 * w); ++j)
        img[shape.at(i, j)] = level;
  };
  box(0.15, 0.45, 0.10, 0.40, 0.55 * peak);
  box(0.55, 0.85, 0.55, 0.90, 0.80 * peak);
  box(0.20, 0.35, 0.60, 0.85, peak);
  const double ci = 0.65 * h, cj = 0.30 * w, r = 0.12 * std::min(h, w);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j)
      if ((i - ci) * (i - ci) + (j - cj) * (j - cj) <= r * r)
        img[shape.at(i, j)] = 0.70 * peak;
  return img;
}

}  // namespace sgp
