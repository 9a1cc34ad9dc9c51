#include <pvsurf/dispersion.hpp>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "doctest.h"
#include "helpers.hpp"

using namespace pvsurf;
using doctest::Approx;

TEST_SUITE_BEGIN("dispersion");

TEST_CASE("residual vanishes at the frozen worked root") {
  const ReferenceState s = testutil::worked_state();
  CHECK(std::abs(lopatinskii_residual(s, {1.0, 0.0}, testutil::worked_tau)) < 1e-12);
  CHECK(std::abs(lopatinskii_residual(s, {1.0, 0.0}, testutil::worked_tau + 0.05)) > 1e-3);
}

TEST_CASE("residual vanishes at the frozen generic root") {
  const ReferenceState s = testutil::generic_state();
  const Vec2 xi = make_frequency(2, 1, 1, 0.0).xi;
  CHECK(std::abs(lopatinskii_residual(s, xi, testutil::generic_tau)) < 1e-12);
}

TEST_CASE("derivative matches finite differences") {
  const ReferenceState s = testutil::generic_state();
  const Vec2 xi = make_frequency(2, 1, 1, 0.0).xi;
  const double tau = 0.9, h = 1e-6;
  const double fd =
      (lopatinskii_residual(s, xi, tau + h) - lopatinskii_residual(s, xi, tau - h)) / (2 * h);
  CHECK(lopatinskii_residual_derivative(s, xi, tau) == Approx(fd).epsilon(1e-7));
}

TEST_CASE("root finder recovers both simple roots") {
  const RootReport r = find_real_roots(testutil::worked_state(), {1.0, 0.0});
  CHECK(r.roots[0] < r.roots[1]);
  CHECK(r.roots[1] == Approx(testutil::worked_tau).epsilon(1e-12));
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(r.residuals[i]) < 1e-11);
    CHECK(std::abs(r.derivative_values[i]) > 1e-6);
  }
}

TEST_CASE("roots approach the closed form as nu vanishes") {
  ReferenceState s = testutil::worked_state();
  s.nu = 1e-8;
  const RootReport r = find_real_roots(s, {1.0, 0.0});
  // -a+ +- sqrt(b+^2 + b-^2 - E3^2) with a+=0.3, b+=1, b-=0, E3=0.5
  const double off = std::sqrt(0.75);
  CHECK(r.roots[0] == Approx(-0.3 - off).epsilon(1e-6));
  CHECK(r.roots[1] == Approx(-0.3 + off).epsilon(1e-6));
}

TEST_CASE("Laplace symbol matches frozen complex values") {
  const std::complex<double> z(0.37, -1.21);
  const std::complex<double> vw = laplace_symbol(testutil::worked_state(), z, 2, 1);
  CHECK(vw.real() == Approx(7.804801344651491686740791).epsilon(1e-13));
  CHECK(vw.imag() == Approx(-1.026170188209739777735803).epsilon(1e-13));
  const std::complex<double> vg = laplace_symbol(testutil::generic_state(), z, 2, 1);
  CHECK(vg.real() == Approx(18.08106212242763135691812).epsilon(1e-13));
  CHECK(vg.imag() == Approx(-1.199876729165541007420295).epsilon(1e-13));
}

TEST_CASE("Laplace symbol is homogeneous of degree three") {
  const std::complex<double> z(0.37, -1.21);
  const std::complex<double> v1 = laplace_symbol(testutil::generic_state(), z, 2, 1);
  const std::complex<double> v2 = laplace_symbol(testutil::generic_state(), 2.0 * z, 4, 2);
  CHECK(std::abs(v2 - 8.0 * v1) < 1e-12 * std::abs(v2));
}

TEST_CASE("Laplace symbol vanishes on the admissible frequency") {
  const std::complex<double> z(0.0, testutil::worked_tau);
  CHECK(std::abs(laplace_symbol(testutil::worked_state(), z, 1, 0)) < 1e-9);
  CHECK_THROWS_AS(laplace_symbol(testutil::worked_state(), z, 0, 0), std::domain_error);
}

TEST_SUITE_END();
