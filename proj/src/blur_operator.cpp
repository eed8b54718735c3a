#include "sgpkit/blur_operator.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace sgp {

namespace {
// FFTW plan creation mutates global planner state; execution does not.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

struct FftwRealBuf {
  double* p;
  explicit FftwRealBuf(int n) : p(fftw_alloc_real(n)) {}
  ~FftwRealBuf() { fftw_free(p); }
  FftwRealBuf(const FftwRealBuf&) = delete;
  FftwRealBuf& operator=(const FftwRealBuf&) = delete;
};

struct FftwComplexBuf {
  fftw_complex* p;
  explicit FftwComplexBuf(int n) : p(fftw_alloc_complex(n)) {}
  ~FftwComplexBuf() { fftw_free(p); }
  FftwComplexBuf(const FftwComplexBuf&) = delete;
  FftwComplexBuf& operator=(const FftwComplexBuf&) = delete;
};
}  // namespace

struct BlurOperator::Impl {
  ImageShape shape;
  int spec_n = 0;  // h * (w/2 + 1)
  std::vector<std::complex<double>> kernel_hat;
  // Plans are created once against prototype buffers and replayed on
  // per-call scratch via the new-array execute API, which is thread safe.
  FftwRealBuf proto_real;
  FftwComplexBuf proto_spec;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;

  Impl(ImageShape s)
      : shape(s),
        spec_n(s.h * (s.w / 2 + 1)),
        proto_real(s.size()),
        proto_spec(spec_n) {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fwd = fftw_plan_dft_r2c_2d(s.h, s.w, proto_real.p, proto_spec.p,
                               FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_2d(s.h, s.w, proto_spec.p, proto_real.p,
                               FFTW_ESTIMATE);
  }

  ~Impl() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
  }

  Vec transform(const Vec& x, bool conjugate) const {
    const int n = shape.size();
    FftwRealBuf real(n);
    FftwComplexBuf spec(spec_n);
    for (int i = 0; i < n; ++i) real.p[i] = x[i];
    fftw_execute_dft_r2c(fwd, real.p, spec.p);
    const double scale = 1.0 / n;
    for (int k = 0; k < spec_n; ++k) {
      const double xr = spec.p[k][0], xi = spec.p[k][1];
      const double kr = kernel_hat[k].real();
      const double ki =
          conjugate ? -kernel_hat[k].imag() : kernel_hat[k].imag();
      spec.p[k][0] = (xr * kr - xi * ki) * scale;
      spec.p[k][1] = (xr * ki + xi * kr) * scale;
    }
    fftw_execute_dft_c2r(inv, spec.p, real.p);
    Vec out(n);
    for (int i = 0; i < n; ++i) out[i] = real.p[i];
    return out;
  }
};

BlurOperator::BlurOperator(const Vec& kernel, ImageShape shape)
    : impl_(std::make_unique<Impl>(shape)) {
  if (kernel.size() != shape.size())
    throw std::invalid_argument("kernel size does not match shape");
  Impl& im = *impl_;
  if (!im.fwd || !im.inv) throw std::runtime_error("fftw planning failed");

  // shift the kernel center to the origin so apply() is circular convolution
  const int ci = (shape.h - 1) / 2, cj = (shape.w - 1) / 2;
  for (int i = 0; i < shape.h; ++i)
    for (int j = 0; j < shape.w; ++j) {
      const int si = (i + ci) % shape.h, sj = (j + cj) % shape.w;
      im.proto_real.p[shape.at(i, j)] = kernel[shape.at(si, sj)];
    }
  fftw_execute(im.fwd);
  im.kernel_hat.resize(im.spec_n);
  for (int k = 0; k < im.spec_n; ++k)
    im.kernel_hat[k] = {im.proto_spec.p[k][0], im.proto_spec.p[k][1]};
}

BlurOperator::~BlurOperator() = default;

ImageShape BlurOperator::shape() const { return impl_->shape; }

Vec BlurOperator::apply(const Vec& x) const {
  if (x.size() != impl_->shape.size())
    throw std::invalid_argument("apply: size mismatch");
  return impl_->transform(x, false);
}

Vec BlurOperator::apply_adjoint(const Vec& x) const {
  if (x.size() != impl_->shape.size())
    throw std::invalid_argument("apply_adjoint: size mismatch");
  return impl_->transform(x, true);
}

double BlurOperator::normal_operator_norm() const {
  double best = 0.0;
  for (const auto& c : impl_->kernel_hat) {
    const double mag2 = std::norm(c);
    if (mag2 > best) best = mag2;
  }
  return best;
}

}  // namespace sgp
