#include <pvsurf/residual.hpp>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"

using namespace pvsurf;
using doctest::Approx;
using cplx = std::complex<double>;

namespace {

FrontSpectrum test_front() {
  return make_front(2, 3,
                    {{1, 0, 1, 0.11, 0.06},
                     {0, 1, 1, -0.05, 0.08},
                     {1, 1, 2, 0.04, -0.03},
                     {2, -1, 3, 0.01, 0.02}});
}

WkbGrid small_grid() {
  WkbGrid g;
  g.nx1 = 16;
  g.nx2 = 16;
  g.n3_per_side = 8;
  return g;
}

WkbField small_field(int l = 8) {
  const Background bg = testutil::worked_background(l);
  const FrontSpectrum f = test_front();
  const FrontSpectrum fdot = amplitude_rhs(bg.coeffs, f, SolverConfig{});
  return assemble_wkb(bg, f, fdot, small_grid());
}

FrontSpectrum axpy(double a, const FrontSpectrum& x, const FrontSpectrum& y) {
  FrontSpectrum r = y;
  for (std::size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] += a * x.coeffs[i];
  return r;
}

}  // namespace

TEST_SUITE_BEGIN("residual");

TEST_CASE("assembly validates its inputs") {
  const Background bg = testutil::worked_background(8);
  const FrontSpectrum f = test_front();
  const FrontSpectrum fdot = amplitude_rhs(bg.coeffs, f, SolverConfig{});
  CHECK_THROWS_AS(assemble_wkb(bg, f, make_front(1, 3, {}), small_grid()),
                  std::invalid_argument);
  WkbGrid coarse = small_grid();
  coarse.nx1 = 4;  // below 2J+1
  CHECK_THROWS_AS(assemble_wkb(bg, f, fdot, coarse), std::invalid_argument);
  Background bad = bg;
  bad.freq.eps *= 1.01;  // break eps = 1/(l |(p,q)|)
  CHECK_THROWS_AS(assemble_wkb(bad, f, fdot, small_grid()), std::invalid_argument);

  const WkbField w = small_field();
  CHECK(w.x3_plasma.size() == 8);
  CHECK(w.x3_vacuum.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(w.x3_plasma[i] > 0.0);
    CHECK(w.x3_vacuum[i] == Approx(-w.x3_plasma[i]).epsilon(1e-15));
    if (i > 0) CHECK(w.x3_plasma[i] > w.x3_plasma[i - 1]);
  }
  // layer nodes scale with eps, outer nodes reach x3_max
  CHECK(w.x3_plasma.front() == Approx(w.eps * (w.grid.c_band + 0.5)).epsilon(1e-14));
  CHECK(w.x3_plasma.back() == Approx(w.grid.x3_max).epsilon(1e-14));
}

TEST_CASE("stored samples agree with direct point evaluation") {
  const WkbField w = small_field();
  const std::size_t n3 = w.x3_plasma.size();
  for (std::size_t a : {std::size_t(0), std::size_t(37), std::size_t(200)}) {
    const double x1 = 2.0 * M_PI * double(a / 16) / 16.0;
    const double x2 = 2.0 * M_PI * double(a % 16) / 16.0;
    const FrontJet fj = front_jet(w, w.time, x1, x2);
    CHECK(w.front_samples[a] == Approx(fj.value).epsilon(1e-12));
    for (std::size_t i3 : {std::size_t(0), std::size_t(5)}) {
      const Jet7 jp = eval_plasma_jet(w, w.time, x1, x2, w.x3_plasma[i3]);
      const Jet6 jv = eval_vacuum_jet(w, w.time, x1, x2, w.x3_vacuum[i3]);
      for (int c = 0; c < 7; ++c)
        CHECK(w.plasma_samples[(a * n3 + i3) * 7 + std::size_t(c)] ==
              Approx(jp.value[std::size_t(c)]).epsilon(1e-11));
      for (int c = 0; c < 6; ++c)
        CHECK(w.vacuum_samples[(a * n3 + i3) * 6 + std::size_t(c)] ==
              Approx(jv.value[std::size_t(c)]).epsilon(1e-11));
    }
  }
}

TEST_CASE("jet space derivatives match finite differences") {
  const WkbField w = small_field();
  const double t = 0.0, x1 = 0.9, x2 = 2.2, x3p = 0.45, x3v = -0.52, h = 1e-3;
  auto fd4 = [&](auto eval, double x, double step) {
    return (-eval(x + 2 * step) + 8.0 * eval(x + step) - 8.0 * eval(x - step) +
            eval(x - 2 * step)) /
           (12.0 * step);
  };
  const Jet7 jp = eval_plasma_jet(w, t, x1, x2, x3p);
  const Jet6 jv = eval_vacuum_jet(w, t, x1, x2, x3v);
  for (int c = 0; c < 7; ++c) {
    const std::size_t cc = std::size_t(c);
    const double d1 = fd4(
        [&](double x) { return eval_plasma_jet(w, t, x, x2, x3p).value[std::size_t(c)]; },
        x1, h);
    const double d2 = fd4(
        [&](double x) { return eval_plasma_jet(w, t, x1, x, x3p).value[std::size_t(c)]; },
        x2, h);
    const double d3 = fd4(
        [&](double x) { return eval_plasma_jet(w, t, x1, x2, x).value[std::size_t(c)]; },
        x3p, h);
    CHECK(std::abs(jp.dx1[cc] - d1) < 1e-7);
    CHECK(std::abs(jp.dx2[cc] - d2) < 1e-7);
    CHECK(std::abs(jp.dx3[cc] - d3) < 1e-7);
  }
  for (int c = 0; c < 6; ++c) {
    const std::size_t cc = std::size_t(c);
    const double d3 = fd4(
        [&](double x) { return eval_vacuum_jet(w, t, x1, x2, x).value[std::size_t(c)]; },
        x3v, h);
    CHECK(std::abs(jv.dx3[cc] - d3) < 1e-7);
  }
  const FrontJet fj = front_jet(w, t, x1, x2);
  const double f1 = fd4([&](double x) { return front_jet(w, t, x, x2).value; }, x1, h);
  const double f2 = fd4([&](double x) { return front_jet(w, t, x1, x).value; }, x2, h);
  CHECK(std::abs(fj.dx1 - f1) < 1e-9);
  CHECK(std::abs(fj.dx2 - f2) < 1e-9);
}

TEST_CASE("jet time derivative is consistent with an advanced front") {
  const Background bg = testutil::worked_background(8);
  const FrontSpectrum f = test_front();
  const FrontSpectrum fdot = amplitude_rhs(bg.coeffs, f, SolverConfig{});
  const WkbGrid grid = small_grid();
  const double delta = 1e-3;
  const WkbField w0 = assemble_wkb(bg, f, fdot, grid);
  const WkbField wp = assemble_wkb(bg, axpy(delta, fdot, f), fdot, grid);
  const WkbField wm = assemble_wkb(bg, axpy(-delta, fdot, f), fdot, grid);
  const double x1 = 1.7, x2 = 0.4, x3 = 0.4;
  const Jet7 j0 = eval_plasma_jet(w0, 0.0, x1, x2, x3);
  const Jet7 jp = eval_plasma_jet(wp, delta, x1, x2, x3);
  const Jet7 jm = eval_plasma_jet(wm, -delta, x1, x2, x3);
  for (int c = 0; c < 7; ++c) {
    const double fd = (jp.value[std::size_t(c)] - jm.value[std::size_t(c)]) / (2 * delta);
    CHECK(std::abs(j0.dt[std::size_t(c)] - fd) <
          1e-4 * std::max(1.0, std::abs(j0.dt[std::size_t(c)])));
  }
  const FrontJet g0 = front_jet(w0, 0.0, x1, x2);
  const double fdg =
      (front_jet(wp, delta, x1, x2).value - front_jet(wm, -delta, x1, x2).value) /
      (2 * delta);
  CHECK(std::abs(g0.dt - fdg) < 1e-6);
}

TEST_CASE("interior equation rows") {
  Jet7 j{};
  for (double v : plasma_equations(j)) CHECK(v == 0.0);
  j.value = {2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  j.dx1 = {3.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5};
  auto r = plasma_equations(j);
  CHECK(r[0] == Approx(2.0 * 3.0 + 0.5).epsilon(1e-15));  // u1 du1/dx1 + dq/dx1
  CHECK(r[6] == Approx(3.0).epsilon(1e-15));              // div u
  Jet6 v{};
  for (double x : vacuum_equations(v, 0.3)) CHECK(x == 0.0);
  v.dx2[5] = 1.0;  // d(E3)/dx2 enters the first circulation row
  v.dt[0] = 2.0;
  auto rv = vacuum_equations(v, 0.3);
  CHECK(rv[0] == Approx(0.3 * 2.0 + 1.0).epsilon(1e-15));
}

TEST_CASE("zero front gives identically zero residuals") {
  const Background bg = testutil::worked_background(8);
  const FrontSpectrum z = make_front(1, 2, {});
  const WkbField w = assemble_wkb(bg, z, z, small_grid());
  const InteriorReport ir = interior_residual(w);
  for (int g = 0; g < 4; ++g) {
    CHECK(ir.plasma[std::size_t(g)].sup < 1e-15);
    CHECK(ir.vacuum[std::size_t(g)].sup < 1e-15);
  }
  CHECK(ir.included_points > 0);
  CHECK(ir.excluded_points == 0);
  const JumpReport jr = jump_residual(w);
  for (int c = 0; c < 5; ++c) CHECK(jr.conditions[std::size_t(c)].sup < 1e-15);
  CHECK(jr.third_row_consistency < 1e-15);
}

TEST_CASE("jump consistency identity holds on a nonzero field") {
  const WkbField w = small_field();
  const JumpReport jr = jump_residual(w);
  CHECK(jr.third_row_consistency < 1e-14);
  CHECK(jr.conditions[0].sup > 0.0);
  for (int c = 0; c < 5; ++c)
    CHECK(jr.conditions[std::size_t(c)].l2 <= jr.conditions[std::size_t(c)].sup * 2.0);
}

TEST_CASE("residuals shrink at the expected rates under eps refinement") {
  const Background bg = testutil::worked_background();
  const FrontSpectrum f = test_front();
  const FrontSpectrum fdot = amplitude_rhs(bg.coeffs, f, SolverConfig{});
  const SweepReport rep = epsilon_sweep(bg, f, fdot, {4, 8, 16}, small_grid());
  REQUIRE(rep.eps.size() == 3);
  CHECK(rep.eps[0] == Approx(0.25).epsilon(1e-15));
  CHECK_FALSE(rep.degenerate);
  CHECK(rep.interior_slope > 0.4);
  CHECK(rep.interior_slope < 1.6);
  CHECK(rep.boundary_slope > 1.4);
  CHECK(rep.boundary_slope < 2.6);
  CHECK_THROWS_AS(epsilon_sweep(bg, f, fdot, {4}, small_grid()), std::invalid_argument);

  const FrontSpectrum z = make_front(2, 3, {});
  const SweepReport dz = epsilon_sweep(bg, z, z, {4, 8}, small_grid());
  CHECK(dz.degenerate);
  CHECK(std::isnan(dz.interior_slope));
}

TEST_CASE("rectification coefficients match frozen values and vanish as required") {
  namespace fr = testutil::frozen;
  const Background w = testutil::worked_background();
  const auto cw = rectification_coefficients(w.state, w.freq.xi, w.freq.tau);
  CHECK(cw[0] == 0.0);
  CHECK(cw[1] == 0.0);
  CHECK(cw[2] == Approx(fr::w_Ct2).epsilon(1e-12));
  const Background g = testutil::generic_background();
  const auto cg = rectification_coefficients(g.state, g.freq.xi, g.freq.tau);
  CHECK(cg[0] == Approx(fr::g_Ctt).epsilon(1e-12));
  CHECK(cg[1] == Approx(fr::g_Ct1).epsilon(1e-12));
  CHECK(cg[2] == Approx(fr::g_Ct2).epsilon(1e-12));

  ReferenceState novac = w.state;
  novac.H0 = {0.0, 0.0, 0.0};
  novac.E3_0 = 0.0;
  const auto cz = rectification_coefficients(novac, {1.0, 0.0}, 0.7);
  CHECK(cz[0] == 0.0);
  CHECK(cz[1] == 0.0);
  CHECK(cz[2] == 0.0);
}

TEST_CASE("indicator matches a closed form on a synthetic trajectory") {
  const Background bg = testutil::generic_background();
  const double al = 0.3, be = 0.2, ga = 0.1;
  auto snap = [&](double t) {
    FrontSpectrum f = make_front(1, 2,
                                 {{0, 0, 1, al * (1 + t), 0.0},
                                  {1, 0, 1, be * (1 + t), 0.0},
                                  {0, 1, 1, ga * (1 + t), 0.0}});
    f.time = t;
    return f;
  };
  const std::vector<FrontSpectrum> traj = {snap(0.0), snap(0.1), snap(0.2)};
  const RectificationReport rep = rectification_indicator(traj, bg);
  REQUIRE(rep.times.size() == 1);
  CHECK(rep.times[0] == Approx(0.1).epsilon(1e-12));
  CHECK(rep.n_grid == 8);
  const auto C = rectification_coefficients(bg.state, bg.freq.xi, bg.freq.tau);
  const double tmid = 0.1;
  double worst = 0.0;
  for (int a1 = 0; a1 < 8; ++a1)
    for (int a2 = 0; a2 < 8; ++a2) {
      const double y1 = 2.0 * M_PI * a1 / 8.0, y2 = 2.0 * M_PI * a2 / 8.0;
      const double gval = al * al + be * be + ga * ga + 2 * al * be * std::cos(y1) +
                          2 * al * ga * std::cos(y2) + 2 * be * ga * std::cos(y1 - y2);
      const double g1 = -2 * al * be * std::sin(y1) - 2 * be * ga * std::sin(y1 - y2);
      const double g2 = -2 * al * ga * std::sin(y2) + 2 * be * ga * std::sin(y1 - y2);
      const double expect =
          C[0] * 4.0 * gval + 4.0 * (1 + tmid) * (C[1] * g1 + C[2] * g2);
      worst = std::max(worst,
                       std::abs(rep.indicator[0][std::size_t(a1 * 8 + a2)] - expect));
      (void)gval;
    }
  CHECK(worst < 1e-12);
  CHECK(rep.derivative_scale > 0.0);
  CHECK(rep.sup > 0.0);

  CHECK_THROWS_AS(rectification_indicator({snap(0.0), snap(0.1)}, bg),
                  std::invalid_argument);
  CHECK_THROWS_AS(rectification_indicator({snap(0.0), snap(0.1), snap(0.15)}, bg),
                  std::invalid_argument);
}

TEST_SUITE_END();
