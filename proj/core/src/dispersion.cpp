#include "pvsurf/dispersion.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace pvsurf {

namespace {

struct ResidualTerms {
  double ap, bp, bm;
  double h1, h2, e3, nu;
};

ResidualTerms terms(const ReferenceState& s, const Vec2& xi) {
  detail::validate_state(s);
  return {xi[0] * s.u0[0] + xi[1] * s.u0[1],
          xi[0] * s.B0[0] + xi[1] * s.B0[1],
          xi[0] * s.H0[0] + xi[1] * s.H0[1],
          s.H0[0], s.H0[1], s.E3_0, s.nu};
}

double residual_at(const ResidualTerms& t, const Vec2& xi, double tau) {
  const double one_m = 1.0 - t.nu * t.nu * tau * tau;
  if (!(one_m > 0.0)) throw std::domain_error("1 - nu^2 tau^2 must be positive");
  const double cp = tau + t.ap;
  const double am1 = t.nu * tau * t.h1 + xi[1] * t.e3;
  const double am2 = t.nu * tau * t.h2 - xi[0] * t.e3;
  return std::sqrt(one_m) * (cp * cp - t.bp * t.bp) + am1 * am1 + am2 * am2 -
         t.bm * t.bm;
}

double derivative_at(const ResidualTerms& t, const Vec2& xi, double tau) {
  const double one_m = 1.0 - t.nu * t.nu * tau * tau;
  if (!(one_m > 0.0)) throw std::domain_error("1 - nu^2 tau^2 must be positive");
  const double cp = tau + t.ap;
  const double am1 = t.nu * tau * t.h1 + xi[1] * t.e3;
  const double am2 = t.nu * tau * t.h2 - xi[0] * t.e3;
  return -t.nu * t.nu * tau / std::sqrt(one_m) * (cp * cp - t.bp * t.bp) +
         std::sqrt(one_m) * 2.0 * cp + 2.0 * am1 * t.nu * t.h1 + 2.0 * am2 * t.nu * t.h2;
}

}  // namespace

double lopatinskii_residual(const ReferenceState& s, const Vec2& xi, double tau) {
  return residual_at(terms(s, xi), xi, tau);
}

double lopatinskii_residual_derivative(const ReferenceState& s, const Vec2& xi,
                                       double tau) {
  return derivative_at(terms(s, xi), xi, tau);
}

RootReport find_real_roots(const ReferenceState& s, const Vec2& xi) {
  const ResidualTerms t = terms(s, xi);
  const double disc = t.bp * t.bp + t.bm * t.bm - t.e3 * t.e3;
  if (!(disc > 0.0)) {
    throw std::runtime_error("root seeding requires b+^2 + b-^2 - E3^2 > 0 (stability)");
  }
  const double r0 = std::sqrt(disc);
  const double center = -t.ap;
  const double scale = coefficient_scale(s, xi);

  auto polish = [&](double lo, double hi) {
    // lo, hi bracket a sign change; Newton clipped to the bracket
    double flo = residual_at(t, xi, lo);
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      const double f = residual_at(t, xi, x);
      if (std::abs(f) < 1e-12 * scale) return x;
      if ((f > 0.0) == (flo > 0.0)) {
        lo = x;
        flo = f;
      } else {
        hi = x;
      }
      const double df = derivative_at(t, xi, x);
      double step = df != 0.0 ? x - f / df : 0.5 * (lo + hi);
      if (!(step > std::min(lo, hi)) || !(step < std::max(lo, hi))) {
        step = 0.5 * (lo + hi);
      }
      x = step;
    }
    return x;
  };

  auto bracket_and_polish = [&](double side) {
    // scan between the residual's negative center and 1.5x the seed offset
    const int n = 200;
    double prev_tau = center;
    double prev_f = residual_at(t, xi, prev_tau);
    std::vector<std::pair<double, double>> table;
    table.emplace_back(prev_tau, prev_f);
    for (int i = 1; i <= n; ++i) {
      const double tau_i = center + side * r0 * (1.5 * i / n);
      const double f = residual_at(t, xi, tau_i);
      table.emplace_back(tau_i, f);
      if ((f > 0.0) != (prev_f > 0.0)) {
        return polish(prev_tau, tau_i);
      }
      prev_tau = tau_i;
      prev_f = f;
    }
    std::ostringstream msg;
    msg << "no sign change while bracketing the root near tau = "
        << center + side * r0 << "; scan table (tau, residual):";
    for (std::size_t i = 0; i < table.size(); i += 20) {
      msg << " (" << table[i].first << ", " << table[i].second << ")";
    }
    throw std::runtime_error(msg.str());
  };

  RootReport rep;
  const double lower = bracket_and_polish(-1.0);
  const double upper = bracket_and_polish(+1.0);
  rep.roots = {lower, upper};
  for (int i = 0; i < 2; ++i) {
    rep.residuals[i] = residual_at(t, xi, rep.roots[i]);
    rep.derivative_values[i] = derivative_at(t, xi, rep.roots[i]);
  }
  return rep;
}

std::complex<double> laplace_symbol(const ReferenceState& s, std::complex<double> z,
                                    int j1, int j2) {
  detail::validate_state(s);
  if (j1 == 0 && j2 == 0) throw std::domain_error("laplace_symbol requires j' != 0");
  using C = std::complex<double>;
  const C I(0.0, 1.0);
  const double aj = std::sqrt(double(j1) * j1 + double(j2) * j2);
  const double uj = s.u0[0] * j1 + s.u0[1] * j2;
  const double Bj = s.B0[0] * j1 + s.B0[1] * j2;
  const double Hj = s.H0[0] * j1 + s.H0[1] * j2;
  const C root = std::sqrt(s.nu * s.nu * z * z + aj * aj);  // principal branch, Re >= 0
  const C plasma = (z + I * uj) * (z + I * uj) - (I * Bj) * (I * Bj);
  const C e1 = s.H0[0] * s.nu * z + I * s.E3_0 * double(j2);
  const C e2 = s.H0[1] * s.nu * z - I * s.E3_0 * double(j1);
  return root * plasma + aj * (e1 * e1 + e2 * e2 - (I * Hj) * (I * Hj));
}

}  // namespace pvsurf
