#include "sgpkit/rng.hpp"

#include <cmath>

namespace sgp {

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = uniform01_open_low();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

std::uint64_t Rng::poisson(double mean) {
  std::uint64_t total = 0;
  // Knuth's method multiplies uniforms until the product drops below
  // exp(-mean); chunking keeps that threshold representable.
  while (mean > 500.0) {
    total += poisson(500.0);
    mean -= 500.0;
  }
  if (mean <= 0.0) return total;
  const double threshold = std::exp(-mean);
  double prod = 1.0;
  std::uint64_t k = 0;
  do {
    ++k;
    prod *= uniform01_open_low();
  } while (prod > threshold);
  return total + (k - 1);
}

}  // namespace sgp
