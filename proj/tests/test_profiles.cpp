#include <pvsurf/profiles.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "helpers.hpp"

using namespace pvsurf;
using doctest::Approx;
using cplx = std::complex<double>;

namespace {

FrontSpectrum small_front(unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-0.2, 0.2);
  std::vector<ModeSeed> seeds;
  for (int k = 1; k <= 4; ++k)
    seeds.push_back({(int(rng() % 3)) - 1, (int(rng() % 3)) - 1, k, dist(rng), dist(rng)});
  return make_front(2, 4, seeds);
}

double vacuum_root_factor(const DerivedCoefficients& c) {
  return std::sqrt(1.0 - c.nu * c.nu * c.tau * c.tau);
}

}  // namespace

TEST_SUITE_BEGIN("profiles");

TEST_CASE("combined symbols equal the tabulated forms") {
  for (const Background& bg : {testutil::worked_background(), testutil::generic_background()}) {
    const SystemMatrices m = build_matrices(bg.state, bg.freq);
    const Matrix7d combo_p = bg.freq.tau * m.A_plus_0 + bg.freq.xi[0] * m.A_plus_1 +
                             bg.freq.xi[1] * m.A_plus_2;
    CHECK((combo_p - m.scrA_plus).cwiseAbs().maxCoeff() < 1e-14);
    const Matrix6d combo_m = bg.freq.tau * m.A_minus_0 + bg.freq.xi[0] * m.A_minus_1 +
                             bg.freq.xi[1] * m.A_minus_2;
    CHECK((combo_m - m.scrA_minus).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("profile directions are annihilated by the fast operators") {
  for (const Background& bg : {testutil::worked_background(), testutil::generic_background()}) {
    const SystemMatrices m = build_matrices(bg.state, bg.freq);
    const double rt = vacuum_root_factor(bg.coeffs);
    for (int k : {1, -1}) {
      const double s = k > 0 ? 1.0 : -1.0;
      const cplx iu(0.0, 1.0);
      const Eigen::Matrix<cplx, 7, 7> Mp =
          -m.A_plus_3.cast<cplx>() + iu * s * m.scrA_plus.cast<cplx>();
      CHECK((Mp * eigvec_plus(k, bg.coeffs)).cwiseAbs().maxCoeff() < 1e-12);
      const Eigen::Matrix<cplx, 6, 6> Mm =
          rt * m.A_minus_3.cast<cplx>() + iu * s * m.scrA_minus.cast<cplx>();
      CHECK((Mm * eigvec_minus_1(k, bg.coeffs)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((Mm * eigvec_minus_2(k, bg.coeffs)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((Mm * eigvec_minus(k, bg.coeffs)).cwiseAbs().maxCoeff() < 1e-10);
      // adjoint directions annihilate from the left in the transpose pairing:
      // L^T M = 0, i.e. M^T L = 0 (no conjugation)
      CHECK((Mp.transpose() * adjoint_plus(k, bg.coeffs)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((Mm.transpose() * adjoint_minus(k, bg.coeffs)).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("eigenvectors at opposite signs are conjugate") {
  const Background bg = testutil::generic_background();
  CHECK((eigvec_plus(-3, bg.coeffs) - eigvec_plus(1, bg.coeffs).conjugate())
            .cwiseAbs()
            .maxCoeff() < 1e-15);
  CHECK((eigvec_minus(-1, bg.coeffs) - eigvec_minus(2, bg.coeffs).conjugate())
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  CHECK_THROWS_AS(eigvec_plus(0, bg.coeffs), std::domain_error);
}

TEST_CASE("closed-form vacuum adjoint matches the combined direction") {
  for (const Background& bg : {testutil::worked_background(), testutil::generic_background()}) {
    const Vector6cd lhs = adjoint_minus(1, bg.coeffs);
    const Vector6cd rhs = -eigvec_minus(1, bg.coeffs) / bg.coeffs.nu;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10 * rhs.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("cutoff plateau and analytic derivative") {
  CutoffSpec chi;
  CHECK(chi.value(0.0) == 1.0);
  CHECK(chi.value(0.999) == 1.0);
  CHECK(chi.value(-0.5) == 1.0);
  CHECK(chi.value(2.0) == 0.0);
  CHECK(chi.value(-2.5) == 0.0);
  CHECK(chi.value(1.5) > 0.0);
  CHECK(chi.value(1.5) < 1.0);
  CHECK(chi.value(1.5) == chi.value(-1.5));
  for (double y : {1.2, 1.5, 1.8, -1.3, -1.7, 0.5, 2.5}) {
    const double h = 1e-5;
    const double fd = (chi.value(y + h) - chi.value(y - h)) / (2 * h);
    CHECK(chi.derivative(y) == Approx(fd).epsilon(1e-5));
  }
  CHECK(chi.derivative(0.3) == 0.0);
  CHECK(chi.derivative(2.4) == 0.0);
}

TEST_CASE("leading profile at a point matches the closed form") {
  const Background bg = testutil::worked_background();
  const cplx amp(0.12, -0.05);
  const FrontSpectrum f = make_front(1, 1, {{1, 1, 1, amp.real(), amp.imag()}});
  ProfileGrid grid;
  grid.y1 = {0.7};
  grid.y2 = {1.3};
  grid.y3 = {0.5};
  grid.Y3_plasma = {0.8};
  grid.Y3_vacuum = {-0.6};
  grid.theta = {2.1};
  const LeadingFields lf = reconstruct_leading(bg, f, grid);
  REQUIRE(lf.U1.size() == 7);
  REQUIRE(lf.V1.size() == 6);
  const cplx tilde = amp * std::exp(cplx(0.0, 0.7 + 1.3));
  const cplx wp = tilde * std::exp(cplx(-0.8, 2.1));
  const Vector7cd Rp = eigvec_plus(1, bg.coeffs);
  for (int c = 0; c < 7; ++c) {
    CHECK(lf.U1[std::size_t(c)].real() == Approx(2.0 * (wp * Rp[c]).real()).epsilon(1e-12));
    CHECK(std::abs(lf.U1[std::size_t(c)].imag()) < 1e-14);
  }
  const double rt = vacuum_root_factor(bg.coeffs);
  const cplx wv = tilde * std::exp(cplx(rt * -0.6, 2.1));
  const Vector6cd Rm = eigvec_minus(1, bg.coeffs);
  for (int c = 0; c < 6; ++c) {
    CHECK(lf.V1[std::size_t(c)].real() == Approx(2.0 * (wv * Rm[c]).real()).epsilon(1e-12));
    CHECK(std::abs(lf.V1[std::size_t(c)].imag()) < 1e-14);
  }

  ProfileGrid bad = grid;
  bad.Y3_plasma = {-0.1};
  CHECK_THROWS_AS(reconstruct_leading(bg, f, bad), std::invalid_argument);
  bad = grid;
  bad.Y3_vacuum = {0.1};
  CHECK_THROWS_AS(reconstruct_leading(bg, f, bad), std::invalid_argument);
}

TEST_CASE("interface operator vanishes on the leading profiles at the root") {
  for (const Background& bg : {testutil::worked_background(), testutil::generic_background()}) {
    const SystemMatrices m = build_matrices(bg.state, bg.freq);
    const FrontSpectrum f = small_front(5);
    CHECK(leading_boundary_residual(f, bg.coeffs, m) < 1e-12);
  }
}

TEST_CASE("interface residual reacts to a perturbed special coefficient") {
  const Background bg = testutil::generic_background();
  const SystemMatrices m = build_matrices(bg.state, bg.freq);
  const FrontSpectrum f = small_front(6);
  DerivedCoefficients pert = bg.coeffs;
  pert.iota1 *= 1.1;
  CHECK(leading_boundary_residual(f, pert, m) > 1e-3 * hs_norm(f, 0.0));
}

TEST_CASE("fast interior residual vanishes at the correct frequency only") {
  for (const Background& bg : {testutil::worked_background(), testutil::generic_background()}) {
    const FrontSpectrum f = small_front(7);
    const FastResidualReport ok = fast_pde_residual_leading(bg, f);
    CHECK(ok.max_abs < 1e-12);
    const FastResidualReport off =
        fast_pde_residual_leading(bg, f, bg.freq.tau * 1.05);
    CHECK(off.max_abs > 1e-4 * hs_norm(f, 0.0));
  }
}

TEST_SUITE_END();
