#pragma once

#include <array>
#include <complex>

#include "pvsurf/params.hpp"

namespace pvsurf {

// Residual of the root condition
//   sqrt(1 - nu^2 tau^2) (c+^2 - b+^2) + (a1-^2 + a2-^2 - b-^2)
// whose simple real zeros select the admissible surface-wave frequencies.
// Throws std::domain_error when 1 - nu^2 tau^2 <= 0.
double lopatinskii_residual(const ReferenceState& state, const Vec2& xi, double tau);

// d/dtau of lopatinskii_residual.
double lopatinskii_residual_derivative(const ReferenceState& state, const Vec2& xi,
                                       double tau);

struct RootReport {
  std::array<double, 2> roots{};             // ascending
  std::array<double, 2> residuals{};         // residual at each polished root
  std::array<double, 2> derivative_values{}; // residual derivative at each root
};

// Finds the two simple real roots of the residual in tau. Preconditions:
// the state satisfies the uniform stability condition (see
// check_stability_H1star) and nu <= 0.05. Roots are seeded from the nu -> 0
// closed form tau0 = -a+ +- sqrt(b+^2 + b-^2 - E3^2), bracketed by a coarse
// scan of +-50% around each seed offset, and polished by safeguarded Newton
// to |residual| < 1e-12 * scale. Throws std::runtime_error with a scan table
// in the message if a bracket cannot be established.
RootReport find_real_roots(const ReferenceState& state, const Vec2& xi);

// Laplace-Fourier symbol of the linearized problem at tangential integer
// frequency j' = (j1, j2) and Laplace variable z; principal square root
// branch (Re >= 0). Throws std::domain_error at j' = (0, 0).
std::complex<double> laplace_symbol(const ReferenceState& state, std::complex<double> z,
                                    int j1, int j2);

}  // namespace pvsurf
