#pragma once

#include <complex>
#include <memory>

#include "sgpkit/image.hpp"

namespace sgp {

/// Periodic convolution by a fixed kernel, applied via real-to-complex FFTs.
/// The kernel is given centered on the grid midpoint and is circularly
/// shifted internally so that apply() realizes classical circular
/// convolution. apply_adjoint() multiplies by the conjugate spectrum, which
/// is the exact transpose of apply() on the same grid.
///
/// Plans use FFTW_ESTIMATE only, so planning is deterministic. The object is
/// immutable after construction; apply()/apply_adjoint() allocate their own
/// scratch, so one instance may be used from several threads at once.
class BlurOperator {
 public:
  BlurOperator(const Vec& kernel, ImageShape shape);
  ~BlurOperator();

  BlurOperator(const BlurOperator&) = delete;
  BlurOperator& operator=(const BlurOperator&) = delete;

  Vec apply(const Vec& x) const;
  Vec apply_adjoint(const Vec& x) const;

  /// Largest eigenvalue of the normal operator: max |kernel_hat|^2.
  double normal_operator_norm() const;

  ImageShape shape() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sgp
