#include "pvsurf/params.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "pvsurf/dispersion.hpp"

namespace pvsurf {

namespace detail {

void validate_state(const ReferenceState& s) {
  if (s.u0[2] != 0.0 || s.B0[2] != 0.0 || s.H0[2] != 0.0) {
    throw std::invalid_argument("reference state must be tangential: u0[2], B0[2], H0[2] == 0");
  }
  if (!(s.nu > 0.0) || !(s.nu < 1.0)) {
    throw std::invalid_argument("nu must lie in (0, 1)");
  }
}

}  // namespace detail

FrequencyTriple make_frequency(int p, int q, int l, double tau) {
  if (p == 0 && q == 0) throw std::invalid_argument("frequency (p, q) must not be (0, 0)");
  if (l <= 0) throw std::invalid_argument("frequency parameter l must be positive");
  FrequencyTriple f;
  f.p = p;
  f.q = q;
  f.l = l;
  f.tau = tau;
  const double r = std::sqrt(double(p) * p + double(q) * q);
  f.xi = {p / r, q / r};
  f.eps = 1.0 / (l * r);
  return f;
}

double coefficient_scale(const ReferenceState& s, const Vec2& xi) {
  const double ap = xi[0] * s.u0[0] + xi[1] * s.u0[1];
  const double bp = xi[0] * s.B0[0] + xi[1] * s.B0[1];
  const double bm = xi[0] * s.H0[0] + xi[1] * s.H0[1];
  return std::max({1.0, ap * ap, bp * bp, bm * bm, s.E3_0 * s.E3_0});
}

DerivedCoefficients derive_coefficients(const ReferenceState& s, const Vec2& xi, double tau) {
  detail::validate_state(s);
  const double nu = s.nu;
  if (nu * tau == 0.0) throw std::domain_error("nu * tau must be nonzero");
  const double one_m = 1.0 - nu * nu * tau * tau;
  if (!(one_m > 0.0)) throw std::domain_error("1 - nu^2 tau^2 must be positive");

  DerivedCoefficients c;
  c.nu = nu;
  c.tau = tau;
  c.xi = xi;
  c.a_plus = xi[0] * s.u0[0] + xi[1] * s.u0[1];
  c.b_plus = xi[0] * s.B0[0] + xi[1] * s.B0[1];
  c.c_plus = tau + c.a_plus;
  c.a_minus_1 = nu * tau * s.H0[0] + xi[1] * s.E3_0;
  c.a_minus_2 = nu * tau * s.H0[1] - xi[0] * s.E3_0;
  c.b_minus = xi[0] * s.H0[0] + xi[1] * s.H0[1];

  const double H1 = s.H0[0], H2 = s.H0[1], E3 = s.E3_0;
  const double x1 = xi[0], x2 = xi[1];
  const double nt = nu * tau, nt2 = nt * nt;
  const double pre = 1.0 / (2.0 * one_m * std::sqrt(one_m));
  c.d0 = nu * pre *
         (nt * (2.0 - nt2) * (H1 * H1 + H2 * H2) + 2.0 * (x2 * H1 - x1 * H2) * E3 +
          nt * E3 * E3 - nt * c.b_minus * c.b_minus);
  c.d1 = -pre * (x1 * (one_m + x2 * x2) * H1 * H1 - 2.0 * x2 * (nt2 - x2 * x2) * H1 * H2 +
                 x1 * (nt2 - x2 * x2) * H2 * H2 + 2.0 * nt * x1 * x2 * H1 * E3 -
                 2.0 * nt * (nt2 - x2 * x2) * H2 * E3 - (1.0 - 2.0 * nt2) * x1 * E3 * E3);
  c.d2 = -pre * (x2 * (nt2 - x1 * x1) * H1 * H1 - 2.0 * x1 * (nt2 - x1 * x1) * H1 * H2 +
                 x2 * (one_m + x1 * x1) * H2 * H2 + 2.0 * nt * (nt2 - x1 * x1) * H1 * E3 -
                 2.0 * nt * x1 * x2 * H2 * E3 - (1.0 - 2.0 * nt2) * x2 * E3 * E3);

  c.iota1 = (nt * c.a_minus_1 - x1 * c.b_minus) / (nt * one_m);
  c.iota2 = (nt * c.a_minus_2 - x2 * c.b_minus) / (nt * one_m);

  c.nl_coeff = c.c_plus * c.c_plus - c.b_plus * c.b_plus - c.a_minus_1 * c.a_minus_1 -
               c.a_minus_2 * c.a_minus_2 + c.b_minus * c.b_minus;
  c.transport_t = c.c_plus + c.d0;
  c.transport_y = {c.c_plus * s.u0[0] - c.b_plus * s.B0[0] + c.d1,
                   c.c_plus * s.u0[1] - c.b_plus * s.B0[1] + c.d2};

  const double scale = coefficient_scale(s, xi) * std::max(1.0, tau * tau);
  if (std::abs(x1 * c.a_minus_1 + x2 * c.a_minus_2 - nt * c.b_minus) > 1e-14 * scale) {
    throw std::logic_error("identity xi_j a-_j == nu tau b- violated");
  }
  const double lin = c.a_minus_1 * c.iota1 + c.a_minus_2 * c.iota2;
  const double rhs = (c.a_minus_1 * c.a_minus_1 + c.a_minus_2 * c.a_minus_2 -
                      c.b_minus * c.b_minus) / one_m;
  const double iscale = std::max({1.0, std::abs(lin), std::abs(rhs)});
  if (std::abs(lin - rhs) > 1e-12 * iscale) {
    throw std::logic_error("identity a-_j iota_j == (a1-^2 + a2-^2 - b-^2)/(1 - nu^2 tau^2) violated");
  }
  return c;
}

StabilityReport check_stability_H1(const ReferenceState& s) {
  detail::validate_state(s);
  StabilityReport r;
  const double S = s.B0[0] * s.B0[0] + s.B0[1] * s.B0[1] + s.H0[0] * s.H0[0] +
                   s.H0[1] * s.H0[1];
  // tangential fields: B0 x H0 = (0, 0, B1 H2 - B2 H1)
  const double cross = s.B0[0] * s.H0[1] - s.B0[1] * s.H0[0];
  const double disc = std::max(0.0, S * S - 4.0 * cross * cross);
  r.rhs = 0.5 * (S - std::sqrt(disc));
  r.margin = r.rhs - s.E3_0 * s.E3_0;
  r.stable = r.margin > 0.0;
  return r;
}

StabilityStarReport check_stability_H1star(const ReferenceState& s) {
  detail::validate_state(s);
  StabilityStarReport r;
  // (xi.B)^2 + (xi.H)^2 = xi^T G xi with Gram matrix G = b b^T + h h^T
  const double g11 = s.B0[0] * s.B0[0] + s.H0[0] * s.H0[0];
  const double g22 = s.B0[1] * s.B0[1] + s.H0[1] * s.H0[1];
  const double g12 = s.B0[0] * s.B0[1] + s.H0[0] * s.H0[1];
  const double tr = g11 + g22;
  const double det = g11 * g22 - g12 * g12;
  const double disc = std::max(0.0, tr * tr - 4.0 * det);
  r.min_value = 0.5 * (tr - std::sqrt(disc));
  r.margin = r.min_value - s.E3_0 * s.E3_0;
  r.stable = r.margin > 0.0;
  // eigenvector of G for the smallest eigenvalue; ties resolved to (1, 0)
  const double v1[2] = {g12, r.min_value - g11};
  const double v2[2] = {r.min_value - g22, g12};
  const double n1 = std::hypot(v1[0], v1[1]);
  const double n2 = std::hypot(v2[0], v2[1]);
  if (std::max(n1, n2) <= 1e-14 * std::max(1.0, tr)) {
    r.argmin_xi = {1.0, 0.0};
  } else if (n1 >= n2) {
    r.argmin_xi = {v1[0] / n1, v1[1] / n1};
  } else {
    r.argmin_xi = {v2[0] / n2, v2[1] / n2};
  }
  return r;
}

AssumptionReport verify_frequency_assumptions(const ReferenceState& s,
                                              const FrequencyTriple& f) {
  detail::validate_state(s);
  AssumptionReport r;
  const double xin = std::hypot(f.xi[0], f.xi[1]);
  r.xi_norm_dev = std::abs(xin - 1.0);
  r.a_plus = f.xi[0] * s.u0[0] + f.xi[1] * s.u0[1];
  r.tau = f.tau;
  const double rpq = std::sqrt(double(f.p) * f.p + double(f.q) * f.q);
  r.h2_ok = (f.p != 0 || f.q != 0) && f.l > 0 && r.xi_norm_dev < 1e-12 &&
            std::abs(f.eps * f.l * rpq - 1.0) < 1e-12;
  const double scale = coefficient_scale(s, f.xi);
  const double nt = s.nu * f.tau;
  if (f.tau != 0.0 && 1.0 - nt * nt > 0.0) {
    r.h3_residual = lopatinskii_residual(s, f.xi, f.tau);
    r.h3_ok = std::abs(r.h3_residual) < 1e-10 * scale;
  } else {
    r.h3_residual = std::numeric_limits<double>::quiet_NaN();
    r.h3_ok = false;
  }
  r.h4_ok = std::abs(r.a_plus) > 1e-12 && std::abs(f.tau) > 1e-12;
  return r;
}

Background make_background(const ReferenceState& state, const FrequencyTriple& freq) {
  Background bg;
  bg.state = state;
  bg.freq = freq;
  bg.coeffs = derive_coefficients(state, freq.xi, freq.tau);
  return bg;
}

}  // namespace pvsurf
