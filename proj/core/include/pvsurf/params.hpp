#pragma once

#include <array>
#include <string>

namespace pvsurf {

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

// Piecewise-constant background of the plasma-vacuum interface problem.
// u0, B0 (plasma velocity / magnetic field) and H0 (vacuum magnetic field)
// must be tangential ([2] == 0); the vacuum electric field is (0, 0, E3_0).
// nu is the displacement-current parameter, required in (0, 1).
struct ReferenceState {
  Vec3 u0{0.0, 0.0, 0.0};
  Vec3 B0{1.0, 0.0, 0.0};
  Vec3 H0{0.0, 1.0, 0.0};
  double E3_0 = 0.0;
  double nu = 0.01;
};

// Tangential wave vector xi = (p,q)/sqrt(p^2+q^2), scale eps = 1/(l sqrt(p^2+q^2)),
// and time frequency tau of the oscillating phase (tau t + xi . x') / eps.
struct FrequencyTriple {
  int p = 1;
  int q = 0;
  int l = 1;
  double tau = 0.0;
  Vec2 xi{1.0, 0.0};
  double eps = 1.0;
};

// Validates (p,q) != (0,0) and l > 0, fills xi and eps.
FrequencyTriple make_frequency(int p, int q, int l, double tau);

// Scalar coefficients of the reduced interface problem at frequency (xi, tau).
struct DerivedCoefficients {
  double a_plus = 0.0;     // xi . u0
  double b_plus = 0.0;     // xi . B0
  double c_plus = 0.0;     // tau + a_plus
  double a_minus_1 = 0.0;  // nu tau H0_1 + xi_2 E3_0
  double a_minus_2 = 0.0;  // nu tau H0_2 - xi_1 E3_0
  double b_minus = 0.0;    // xi . H0
  double d0 = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double iota1 = 0.0;
  double iota2 = 0.0;
  double nl_coeff = 0.0;      // c+^2 - b+^2 - a1-^2 - a2-^2 + b-^2
  double transport_t = 0.0;   // c+ + d0
  Vec2 transport_y{0.0, 0.0}; // c+ u0_j - b+ B0_j + d_j
  double nu = 0.0;            // carried along for profile formulas
  double tau = 0.0;
  Vec2 xi{1.0, 0.0};
};

// Computes all reduced coefficients. Throws std::invalid_argument on a
// non-tangential or out-of-range state, std::domain_error when nu*tau == 0
// or 1 - nu^2 tau^2 <= 0. Internal identities (xi_j a-_j = nu tau b-,
// a-_j iota_j = (a1-^2 + a2-^2 - b-^2)/(1 - nu^2 tau^2)) are checked to
// 1e-14 / 1e-12 relative and violation throws std::logic_error.
DerivedCoefficients derive_coefficients(const ReferenceState& state, const Vec2& xi,
                                        double tau);

struct StabilityReport {
  bool stable = false;  // strict inequality; zero margin counts as violated
  double margin = 0.0;  // rhs - |E0|^2
  double rhs = 0.0;     // (S - sqrt(S^2 - 4P))/2, S = |B0|^2+|H0|^2, P = |B0 x H0|^2
};
StabilityReport check_stability_H1(const ReferenceState& state);

struct StabilityStarReport {
  bool stable = false;
  double margin = 0.0;     // min_value - E3_0^2
  double min_value = 0.0;  // min over |xi|=1 of (xi.B0)^2 + (xi.H0)^2
  Vec2 argmin_xi{1.0, 0.0};
};
StabilityStarReport check_stability_H1star(const ReferenceState& state);

struct AssumptionReport {
  double xi_norm_dev = 0.0;  // | |xi| - 1 |
  double h3_residual = 0.0;  // dispersion residual at (xi, tau)
  double a_plus = 0.0;
  double tau = 0.0;
  bool h2_ok = false;  // integer frequency well formed (and |xi| = 1, eps consistent)
  bool h3_ok = false;  // tau solves the root condition to 1e-10 * scale
  bool h4_ok = false;  // a_plus != 0 and tau != 0
};
// Reports assumption violations instead of throwing.
AssumptionReport verify_frequency_assumptions(const ReferenceState& state,
                                              const FrequencyTriple& freq);

// Bundle used by the profile and residual layers: a validated state plus its
// frequency and derived coefficients.
struct Background {
  ReferenceState state;
  FrequencyTriple freq;
  DerivedCoefficients coeffs;
};
Background make_background(const ReferenceState& state, const FrequencyTriple& freq);

// Magnitude scale used for root/residual tolerances.
double coefficient_scale(const ReferenceState& state, const Vec2& xi);

namespace detail {
void validate_state(const ReferenceState& state);
}

}  // namespace pvsurf
