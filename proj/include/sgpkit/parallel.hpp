#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sgp {

/// Number of fixed reduction chunks. Reductions accumulate per-chunk partials
/// and combine them serially in chunk order, so results are bit-identical
/// regardless of thread count.
inline constexpr std::size_t kReductionChunks = 64;

template <class F>
void parallel_for(std::size_t n, F&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(n); ++i)
    body(static_cast<std::size_t>(i));
#else
  for (std::size_t i = 0; i < n; ++i) body(i);
#endif
}

/// Deterministic dot product: fixed chunking, serial combine.
inline double det_dot(const double* a, const double* b, std::size_t n) {
  double partial[kReductionChunks] = {};
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long long c = 0; c < static_cast<long long>(kReductionChunks); ++c) {
    const std::size_t lo = n * c / kReductionChunks;
    const std::size_t hi = n * (c + 1) / kReductionChunks;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
    partial[c] = s;
  }
  double total = 0.0;
  for (std::size_t c = 0; c < kReductionChunks; ++c) total += partial[c];
  return total;
}

/// Deterministic sum with the same chunking scheme as det_dot.
inline double det_sum(const double* a, std::size_t n) {
  double partial[kReductionChunks] = {};
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long long c = 0; c < static_cast<long long>(kReductionChunks); ++c) {
    const std::size_t lo = n * c / kReductionChunks;
    const std::size_t hi = n * (c + 1) / kReductionChunks;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i];
    partial[c] = s;
  }
  double total = 0.0;
  for (std::size_t c = 0; c < kReductionChunks; ++c) total += partial[c];
  return total;
}

}  // namespace sgp
