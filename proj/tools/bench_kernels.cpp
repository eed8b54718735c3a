#include <benchmark/benchmark.h>

#include "sgpkit/kernels.hpp"
#include "sgpkit/parallel.hpp"
#include "sgpkit/rng.hpp"

namespace {

sgp::Vec random_image(int n, std::uint64_t seed) {
  sgp::Rng rng(seed);
  sgp::Vec x(n);
  for (int i = 0; i < n; ++i) x[i] = rng.uniform01() + 0.1;
  return x;
}

void bm_grad_forward(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const sgp::ImageShape shape{side, side};
  const sgp::Vec x = random_image(shape.size(), 1);
  sgp::Vec g;
  for (auto _ : state) {
    sgp::grad_forward(x, shape, g);
    benchmark::DoNotOptimize(g.data());
  }
}

void bm_grad_forward_serial(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const sgp::ImageShape shape{side, side};
  const sgp::Vec x = random_image(shape.size(), 1);
  sgp::Vec g;
  for (auto _ : state) {
    sgp::grad_forward_serial(x, shape, g);
    benchmark::DoNotOptimize(g.data());
  }
}

void bm_divergence(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const sgp::ImageShape shape{side, side};
  const sgp::Vec p = random_image(2 * shape.size(), 2);
  sgp::Vec out;
  for (auto _ : state) {
    sgp::divergence(p, shape, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void bm_divergence_serial(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const sgp::ImageShape shape{side, side};
  const sgp::Vec p = random_image(2 * shape.size(), 2);
  sgp::Vec out;
  for (auto _ : state) {
    sgp::divergence_serial(p, shape, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void bm_hs_split(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const sgp::ImageShape shape{side, side};
  const sgp::Vec x = random_image(shape.size(), 3);
  sgp::Vec u, v;
  for (auto _ : state) {
    sgp::hs_split(x, shape, 0.1, u, v);
    benchmark::DoNotOptimize(u.data());
  }
}

void bm_hs_split_serial(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const sgp::ImageShape shape{side, side};
  const sgp::Vec x = random_image(shape.size(), 3);
  sgp::Vec u, v;
  for (auto _ : state) {
    sgp::hs_split_serial(x, shape, 0.1, u, v);
    benchmark::DoNotOptimize(u.data());
  }
}

void bm_det_dot(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const sgp::Vec a = random_image(n, 4);
  const sgp::Vec b = random_image(n, 5);
  for (auto _ : state) {
    double r = sgp::det_dot(a.data(), b.data(), static_cast<std::size_t>(n));
    benchmark::DoNotOptimize(r);
  }
}

void bm_eigen_dot(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const sgp::Vec a = random_image(n, 4);
  const sgp::Vec b = random_image(n, 5);
  for (auto _ : state) {
    double r = a.dot(b);
    benchmark::DoNotOptimize(r);
  }
}

}  // namespace

BENCHMARK(bm_grad_forward)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(bm_grad_forward_serial)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(bm_divergence)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(bm_divergence_serial)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(bm_hs_split)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(bm_hs_split_serial)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(bm_det_dot)->Arg(1 << 12)->Arg(1 << 18)->Arg(1 << 22);
BENCHMARK(bm_eigen_dot)->Arg(1 << 12)->Arg(1 << 18)->Arg(1 << 22);

BENCHMARK_MAIN();
