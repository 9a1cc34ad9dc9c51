#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "pvsurf/amplitude.hpp"
#include "pvsurf/params.hpp"

namespace pvsurf {

using Matrix7d = Eigen::Matrix<double, 7, 7>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Matrix67d = Eigen::Matrix<double, 6, 7>;
using Vector6d = Eigen::Matrix<double, 6, 1>;
using Vector7cd = Eigen::Matrix<std::complex<double>, 7, 1>;
using Vector6cd = Eigen::Matrix<std::complex<double>, 6, 1>;

// Jacobian/symbol matrices of the linearized interior systems plus the
// interface operator (B_plus, B_minus, b_vec) acting on (U1, V1, d_theta phi).
struct SystemMatrices {
  Matrix7d A_plus_0, A_plus_1, A_plus_2, A_plus_3;
  Matrix6d A_minus_0, A_minus_1, A_minus_2, A_minus_3;
  Matrix7d scrA_plus;   // tau*A+_0 + xi_j A+_j (explicit tabulated form)
  Matrix6d scrA_minus;  // tau*A-_0 + xi_j A-_j (explicit tabulated form)
  Matrix67d B_plus;
  Matrix6d B_minus;
  Vector6d b_vec;
};

SystemMatrices build_matrices(const ReferenceState& state, const Vec2& xi, double tau);
SystemMatrices build_matrices(const ReferenceState& state, const FrequencyTriple& freq);

// Surface-wave eigenvectors and adjoints; they depend on k only through
// sgn(k), and obey R(-k) = conj(R(k)). k == 0 throws std::domain_error.
Vector7cd eigvec_plus(int k, const DerivedCoefficients& c);
Vector6cd eigvec_minus_1(int k, const DerivedCoefficients& c);
Vector6cd eigvec_minus_2(int k, const DerivedCoefficients& c);
// The physical vacuum profile direction: iota_1 * R-_1 + iota_2 * R-_2.
Vector6cd eigvec_minus(int k, const DerivedCoefficients& c);
Vector7cd adjoint_plus(int k, const DerivedCoefficients& c);
// Closed-form adjoint; equals -eigvec_minus(k)/nu (independent evaluation).
Vector6cd adjoint_minus(int k, const DerivedCoefficients& c);

// Smooth plateau cutoff: 1 on |y| <= inner, 0 on |y| >= outer, C-infinity
// blend via the standard exp(-1/t) transition. derivative() is analytic.
struct CutoffSpec {
  double inner = 1.0;
  double outer = 2.0;
  double value(double y) const;
  double derivative(double y) const;
};

// Tensor evaluation grid for the leading profiles. Fast normal nodes are
// split per side: Y3_plasma must all be >= 0, Y3_vacuum all <= 0.
struct ProfileGrid {
  std::vector<double> y1, y2;
  std::vector<double> y3;
  std::vector<double> Y3_plasma;
  std::vector<double> Y3_vacuum;
  std::vector<double> theta;
};

// Sampled leading profiles. Point-major layout with grid order
// (y1, y2, y3, Y3, theta) — y' slowest, theta fastest — and the 7 (plasma)
// or 6 (vacuum) components contiguous per point. Values are complex only to
// let tests assert the imaginary parts vanish; the fields are real.
struct LeadingFields {
  std::vector<std::complex<double>> U1;  // ny1*ny2*ny3*|Y3_plasma|*ntheta*7
  std::vector<std::complex<double>> V1;  // ny1*ny2*ny3*|Y3_vacuum|*ntheta*6
};

LeadingFields reconstruct_leading(const Background& bg, const FrontSpectrum& front,
                                  const ProfileGrid& grid, const CutoffSpec& cutoff = {});

// Sup over a (y', theta) grid of the interface operator applied to the
// leading profiles at y3 = Y3 = 0; vanishes when tau is an accepted root and
// the iota coefficients are unperturbed.
double leading_boundary_residual(const FrontSpectrum& front, const DerivedCoefficients& c,
                                 const SystemMatrices& m, int n_theta = 16);

struct FastResidualReport {
  std::array<double, 7> plasma{};       // rows of (A+_3 dY3 + scrA+ dtheta) U1
  std::array<double, 6> vacuum{};       // rows of (A-_3 dY3 + scrA- dtheta) V1
  std::array<double, 4> divergences{};  // fast parts: div u, div B, div H, div E
  double max_abs = 0.0;
};

// Applies the fast interior operators and the four fast divergence
// constraints to the leading profiles over an internal grid. op_tau, when
// set, builds the operator symbols at a different frequency than the one the
// profiles were constructed with (sensitivity probe).
FastResidualReport fast_pde_residual_leading(const Background& bg, const FrontSpectrum& front,
                                             std::optional<double> op_tau = {}, int n_Y3 = 6,
                                             int n_theta = 12);

}  // namespace pvsurf
