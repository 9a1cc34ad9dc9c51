// Interaction-kernel throughput: closed-form evaluation and the two
// quadratic-sum strategies (dense direct pairing vs banded exponential-
// integral quadrature), across spectrum sizes.
#include <benchmark/benchmark.h>

#include <complex>
#include <random>
#include <vector>

#include <pvsurf/kernel.hpp>

namespace {

std::vector<std::complex<double>> random_spectrum(int K, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  std::vector<std::complex<double>> a(std::size_t(2 * K + 1));
  for (int k = 1; k <= K; ++k) {
    a[std::size_t(k + K)] = {dist(rng), dist(rng)};
    a[std::size_t(-k + K)] = std::conj(a[std::size_t(k + K)]);
  }
  return a;
}

void BM_kernel_lambda(benchmark::State& state) {
  double acc = 0.0;
  for (auto _ : state) {
    for (long k1 = 1; k1 <= 64; ++k1)
      for (long k2 = -64; k2 <= 64; ++k2) {
        if (k2 == 0 || k1 + k2 == 0) continue;
        acc += pvsurf::kernel_lambda(k1, k2);
      }
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * 64 * 127);
}
BENCHMARK(BM_kernel_lambda);

void BM_quadratic_sum_direct(benchmark::State& state) {
  const int K = int(state.range(0));
  const auto a = random_spectrum(K, 42);
  const pvsurf::KernelPlan plan{K, pvsurf::KernelMode::direct, 96};
  for (auto _ : state) {
    auto out = pvsurf::quadratic_sum_all(a, plan);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_quadratic_sum_direct)->Arg(16)->Arg(64)->Arg(256);

void BM_quadratic_sum_exp_integral(benchmark::State& state) {
  const int K = int(state.range(0));
  const auto a = random_spectrum(K, 42);
  const pvsurf::KernelPlan plan{K, pvsurf::KernelMode::exp_integral, 96};
  for (auto _ : state) {
    auto out = pvsurf::quadratic_sum_all(a, plan);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_quadratic_sum_exp_integral)->Arg(16)->Arg(64)->Arg(256);

}  // namespace
