// Front-equation costs: one right-hand-side evaluation and one full RK4 step
// across truncation sizes, on the worked stable reference state.
#include <benchmark/benchmark.h>

#include <random>

#include <pvsurf/amplitude.hpp>
#include <pvsurf/params.hpp>

namespace {

pvsurf::Background worked_background() {
  pvsurf::ReferenceState s;
  s.u0 = {0.3, 0.0, 0.0};
  s.B0 = {1.0, 0.0, 0.0};
  s.H0 = {0.0, 1.0, 0.0};
  s.E3_0 = 0.5;
  s.nu = 0.01;
  return pvsurf::make_background(
      s, pvsurf::make_frequency(1, 0, 1, 0.569285040951824122212115665822));
}

pvsurf::FrontSpectrum random_front(int J, int K, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-0.1, 0.1);
  std::vector<pvsurf::ModeSeed> seeds;
  for (int j1 = -J; j1 <= J; ++j1)
    for (int j2 = -J; j2 <= J; ++j2)
      for (int k = 1; k <= K; ++k) seeds.push_back({j1, j2, k, dist(rng), dist(rng)});
  return pvsurf::make_front(J, K, seeds);
}

void BM_amplitude_rhs(benchmark::State& state) {
  const auto bg = worked_background();
  const int J = int(state.range(0)), K = int(state.range(1));
  const auto f = random_front(J, K, 7);
  const pvsurf::SolverConfig cfg;
  for (auto _ : state) {
    auto out = pvsurf::amplitude_rhs(bg.coeffs, f, cfg);
    benchmark::DoNotOptimize(out.coeffs.data());
  }
}
BENCHMARK(BM_amplitude_rhs)->Args({2, 8})->Args({4, 16})->Args({8, 64});

void BM_integrate_step(benchmark::State& state) {
  const auto bg = worked_background();
  const int J = int(state.range(0)), K = int(state.range(1));
  const auto f = random_front(J, K, 7);
  pvsurf::SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 1e-3;  // exactly one RK4 step
  for (auto _ : state) {
    auto res = pvsurf::integrate(bg.coeffs, f, cfg);
    benchmark::DoNotOptimize(res.front.coeffs.data());
  }
}
BENCHMARK(BM_integrate_step)->Args({2, 8})->Args({4, 16})->Args({8, 64});

}  // namespace
