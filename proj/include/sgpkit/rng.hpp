#pragma once

#include <cstdint>
#include <random>

namespace sgp {

/// Seedable generator with hand-rolled distribution transforms so that
/// sampled streams are identical across platforms and standard libraries.
/// Engine: mt19937_64. Gaussian: Box-Muller. Poisson: Knuth's product
/// method, split into chunks of mean 500 to keep exp() in range.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1p-53;
  }

  /// Uniform on (0, 1]; used where log(u) must stay finite.
  double uniform01_open_low() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double gaussian();

  /// Poisson sample; exact for any non-negative mean.
  std::uint64_t poisson(double mean);

  /// Fisher-Yates index shuffle helper: uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // rejection sampling to avoid modulo bias
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sgp
