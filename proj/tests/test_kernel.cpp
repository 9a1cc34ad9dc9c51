#include <pvsurf/kernel.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"

using namespace pvsurf;
using doctest::Approx;
using cplx = std::complex<double>;

namespace {

// spectrum with k = -K..K at index k+K, conjugate-symmetric, zero mean mode
std::vector<cplx> random_spectrum(int K, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  std::vector<cplx> a(2 * K + 1, cplx(0, 0));
  for (int k = 1; k <= K; ++k) {
    a[std::size_t(k + K)] = cplx(dist(rng), dist(rng));
    a[std::size_t(-k + K)] = std::conj(a[std::size_t(k + K)]);
  }
  return a;
}

// the frozen interaction test spectrum (K = 4)
std::vector<cplx> frozen_spectrum() {
  std::vector<cplx> a(9, cplx(0, 0));
  a[5] = cplx(0.31, 0.46);
  a[6] = cplx(-0.12, 0.08);
  a[7] = cplx(0.05, -0.21);
  a[8] = cplx(0.017, 0.033);
  for (int k = 1; k <= 4; ++k) a[std::size_t(4 - k)] = std::conj(a[std::size_t(4 + k)]);
  return a;
}

}  // namespace

TEST_SUITE_BEGIN("kernel");

TEST_CASE("closed-form kernel values") {
  CHECK(kernel_lambda(1, 1) == 1.0);
  CHECK(kernel_lambda(2, -1) == 1.0);
  CHECK(kernel_lambda(3, 2) == 6.0);
  CHECK_THROWS_AS(kernel_lambda(0, 1), std::domain_error);
  CHECK_THROWS_AS(kernel_lambda(1, 0), std::domain_error);
  CHECK_THROWS_AS(kernel_lambda(2, -2), std::domain_error);
}

TEST_CASE("kernel symmetry, reality, homogeneity, piecewise equality") {
  for (long k1 = -60; k1 <= 60; ++k1)
    for (long k2 = -60; k2 <= 60; ++k2) {
      if (k1 == 0 || k2 == 0 || k1 + k2 == 0) continue;
      const double v = kernel_lambda(k1, k2);
      CHECK(v == kernel_lambda(k2, k1));
      CHECK(v == kernel_lambda(-k1, -k2));
      CHECK(kernel_lambda(2 * k1, 2 * k2) == 4.0 * v);
      CHECK(v == kernel_lambda_piecewise(k1, k2));
      CHECK(v > 0.0);
    }
}

TEST_CASE("quadratic sums reproduce hand-checked values") {
  KernelPlan plan;
  plan.K = 4;
  const std::vector<cplx> a = frozen_spectrum();
  const cplx q1 = quadratic_sum(a, 1, plan);
  const cplx q2 = quadratic_sum(a, 2, plan);
  const cplx q3 = quadratic_sum(a, 3, plan);
  const cplx qm2 = quadratic_sum(a, -2, plan);
  CHECK(q1.real() == Approx(-0.06424).epsilon(1e-13));
  CHECK(q1.imag() == Approx(0.13806).epsilon(1e-13));
  CHECK(q2.real() == Approx(-0.21755).epsilon(1e-13));
  CHECK(q2.imag() == Approx(-0.05488).epsilon(1e-13));
  CHECK(q3.real() == Approx(-0.08665).epsilon(1e-13));
  CHECK(q3.imag() == Approx(-0.05357).epsilon(1e-13));
  CHECK(qm2.real() == Approx(q2.real()).epsilon(1e-14));
  CHECK(qm2.imag() == Approx(-q2.imag()).epsilon(1e-14));
}

TEST_CASE("single-pair sanity values") {
  KernelPlan plan;
  plan.K = 1;
  std::vector<cplx> a(3, cplx(0, 0));
  a[2] = cplx(1.0, 0.0);
  a[0] = cplx(1.0, 0.0);
  CHECK(quadratic_sum(a, 2, plan).real() == Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(quadratic_sum(a, 2, plan).imag()) < 1e-15);
  a[2] = cplx(0.0, 1.0);
  a[0] = cplx(0.0, -1.0);
  CHECK(quadratic_sum(a, 2, plan).real() == Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("vector form matches single outputs and zeroes the mean mode") {
  KernelPlan plan;
  plan.K = 4;
  const std::vector<cplx> a = frozen_spectrum();
  const std::vector<cplx> all = quadratic_sum_all(a, plan);
  REQUIRE(all.size() == std::size_t(4 * plan.K + 1));
  CHECK(std::abs(all[std::size_t(2 * plan.K)]) == 0.0);
  for (int k = -2 * plan.K; k <= 2 * plan.K; ++k) {
    if (k == 0) continue;
    const cplx ref = quadratic_sum(a, k, plan);
    CHECK(std::abs(all[std::size_t(k + 2 * plan.K)] - ref) < 1e-14);
  }
}

TEST_CASE("exponential-integral quadrature agrees with direct summation") {
  const int K = 64;
  const std::vector<cplx> a = random_spectrum(K, 4242);
  KernelPlan direct{K, KernelMode::direct, 96};
  KernelPlan quad{K, KernelMode::exp_integral, 96};
  const std::vector<cplx> d = quadratic_sum_all(a, direct);
  const std::vector<cplx> g = quadratic_sum_all(a, quad);
  double scale = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    scale = std::max(scale, std::abs(d[i]));
    diff = std::max(diff, std::abs(d[i] - g[i]));
  }
  CHECK(diff < 1e-11 * std::max(1.0, scale));
}

TEST_CASE("reality is preserved for conjugate-symmetric input") {
  const int K = 16;
  const std::vector<cplx> a = random_spectrum(K, 7);
  KernelPlan plan{K, KernelMode::direct, 96};
  const std::vector<cplx> q = quadratic_sum_all(a, plan);
  for (int k = 1; k <= 2 * K; ++k) {
    const cplx plus = q[std::size_t(k + 2 * K)];
    const cplx minus = q[std::size_t(-k + 2 * K)];
    CHECK(std::abs(minus - std::conj(plus)) < 1e-13);
  }
}

TEST_SUITE_END();
