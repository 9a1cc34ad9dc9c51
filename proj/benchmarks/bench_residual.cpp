// Field assembly and residual measurement over the sampling grid; the
// dominant cost of a scaling sweep. Thread scaling is exposed via the
// worker-count argument.
#include <benchmark/benchmark.h>

#include <pvsurf/amplitude.hpp>
#include <pvsurf/parallel.hpp>
#include <pvsurf/params.hpp>
#include <pvsurf/residual.hpp>

namespace {

pvsurf::Background worked_background() {
  pvsurf::ReferenceState s;
  s.u0 = {0.3, 0.0, 0.0};
  s.B0 = {1.0, 0.0, 0.0};
  s.H0 = {0.0, 1.0, 0.0};
  s.E3_0 = 0.5;
  s.nu = 0.01;
  return pvsurf::make_background(
      s, pvsurf::make_frequency(1, 0, 8, 0.569285040951824122212115665822));
}

struct Setup {
  pvsurf::Background bg = worked_background();
  pvsurf::FrontSpectrum front;
  pvsurf::FrontSpectrum front_dot;
  Setup() {
    front = pvsurf::make_front(2, 3,
                               {{1, 0, 1, 0.1, 0.05},
                                {0, 1, 2, -0.07, 0.02},
                                {2, -1, 3, 0.0, 0.03},
                                {1, 1, 1, 0.04, -0.06}});
    front_dot = pvsurf::amplitude_rhs(bg.coeffs, front, pvsurf::SolverConfig{});
  }
};

void BM_assemble_wkb(benchmark::State& state) {
  static const Setup s;
  pvsurf::set_threads(int(state.range(1)));
  pvsurf::WkbGrid grid;
  grid.nx1 = grid.nx2 = int(state.range(0));
  grid.n3_per_side = int(state.range(0)) * 3 / 4;
  for (auto _ : state) {
    auto field = pvsurf::assemble_wkb(s.bg, s.front, s.front_dot, grid);
    benchmark::DoNotOptimize(field.plasma_samples.data());
  }
  pvsurf::set_threads(0);
  const long n = long(grid.nx1) * grid.nx2 * 2 * grid.n3_per_side;
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_assemble_wkb)->Args({32, 1})->Args({32, 4})->Args({64, 1})->Args({64, 4});

void BM_interior_residual(benchmark::State& state) {
  static const Setup s;
  pvsurf::WkbGrid grid;
  grid.nx1 = grid.nx2 = int(state.range(0));
  grid.n3_per_side = int(state.range(0)) * 3 / 4;
  const auto field = pvsurf::assemble_wkb(s.bg, s.front, s.front_dot, grid);
  for (auto _ : state) {
    auto rep = pvsurf::interior_residual(field);
    benchmark::DoNotOptimize(&rep);
  }
}
BENCHMARK(BM_interior_residual)->Arg(32)->Arg(64);

void BM_jump_residual(benchmark::State& state) {
  static const Setup s;
  pvsurf::WkbGrid grid;
  grid.nx1 = grid.nx2 = int(state.range(0));
  grid.n3_per_side = int(state.range(0)) * 3 / 4;
  const auto field = pvsurf::assemble_wkb(s.bg, s.front, s.front_dot, grid);
  for (auto _ : state) {
    auto rep = pvsurf::jump_residual(field);
    benchmark::DoNotOptimize(&rep);
  }
}
BENCHMARK(BM_jump_residual)->Arg(32)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
