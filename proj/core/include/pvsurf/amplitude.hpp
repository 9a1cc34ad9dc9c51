#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "pvsurf/kernel.hpp"
#include "pvsurf/params.hpp"

namespace pvsurf {

// Spectral front amplitude phi(t, y', theta) stored as coefficients
// phihat(j1, j2, k), j1, j2 in [-J, J], k in [-K, K], k fastest.
// Invariants: the k = 0 slice vanishes and phihat(-j', -k) = conj(phihat(j', k)).
struct FrontSpectrum {
  int J = 0;
  int K = 0;
  double time = 0.0;
  std::vector<std::complex<double>> coeffs;

  std::size_t index(int j1, int j2, int k) const {
    return (std::size_t(j1 + J) * (2 * J + 1) + std::size_t(j2 + J)) * (2 * K + 1) +
           std::size_t(k + K);
  }
  std::complex<double>& at(int j1, int j2, int k) { return coeffs[index(j1, j2, k)]; }
  const std::complex<double>& at(int j1, int j2, int k) const {
    return coeffs[index(j1, j2, k)];
  }
};

struct ModeSeed {
  int j1 = 0, j2 = 0, k = 1;
  double re = 0.0, im = 0.0;
};

// Builds a spectrum from seed modes; each seed also sets the conjugate mode
// at (-j', -k) so the represented front is real. Seeds with k == 0 are
// rejected.
FrontSpectrum make_front(int J, int K, const std::vector<ModeSeed>& seeds,
                         double time = 0.0);

// Sobolev norm sqrt( sum (1 + |j'|^2 + k^2)^s |phihat|^2 ).
double hs_norm(const FrontSpectrum& phi, double s);

// T = 1 / (K_const * ||phi0||_{H^4}); +infinity for a vanishing front.
double existence_time_estimate(const FrontSpectrum& phi0, double k_const);

struct SolverConfig {
  double dt = 1e-3;
  double t_end = 0.0;
  bool dealias = true;                        // 2/3-rule cut in k per stage
  double blowup_h4_factor = 10.0;             // abort when H4 exceeds factor * initial
  double k_const = 1.0;
  KernelMode kernel_mode = KernelMode::direct;
  int kernel_nodes = 96;
};

// dt default: min(1e-3, 0.1 / (K * max |transport_y / transport_t|)).
double default_dt(const DerivedCoefficients& c, int K);

// Right-hand side of the nonlocal front equation,
//   dphi/dt (j',k) = -[ i (transport_y . j') phihat
//                       + i nl_coeff sgn(k) Q(j',k) ] / transport_t,
// with Q the kernel quadratic sum evaluated pointwise on the y' collocation
// grid. The k = 0 row is forced to zero. Throws std::domain_error when
// transport_t == 0. Requires the reality invariant on phi.
FrontSpectrum amplitude_rhs(const DerivedCoefficients& c, const FrontSpectrum& phi,
                            const SolverConfig& cfg);

// Linearization at background phi applied to corr, plus optional forcing:
// the quadratic term becomes 2 i nl_coeff sgn(k) sum W phihat(k1) corr(k2).
FrontSpectrum linearized_rhs(const DerivedCoefficients& c, const FrontSpectrum& phi,
                             const FrontSpectrum& corr, const FrontSpectrum* forcing,
                             const SolverConfig& cfg);

enum class SolveStatus { ok, blowup, nan };

struct SolveResult {
  FrontSpectrum front;
  SolveStatus status = SolveStatus::ok;
  long steps = 0;
  double h4_initial = 0.0;
  double h4_final = 0.0;
};

// Classic RK4 with optional per-stage dealiasing; reality and zero-k-mode
// projections are applied after every step; aborts on NaN or H4 blow-up.
// on_step (optional) observes each accepted state.
SolveResult integrate(const DerivedCoefficients& c, FrontSpectrum phi0,
                      const SolverConfig& cfg,
                      const std::function<void(const FrontSpectrum&)>& on_step = {});

// Projections used by the integrator (also handy in tests).
void project_reality(FrontSpectrum& phi);
void project_zero_mode(FrontSpectrum& phi);
void dealias_cut(FrontSpectrum& phi);

// Collocation grid size in each y' direction: alias-free for quadratic
// products with modes |j| <= J.
int collocation_size(int J);

// Theta-harmonics of phi at one y' point, with optional y'-derivative orders:
// out[k] = sum_j phihat(j,k) (i j1)^dy1 (i j2)^dy2 e^{i j . y'} for k = 1..K;
// out[0] = 0; negative harmonics follow by conjugation (for dy1 = dy2 = 0).
std::vector<std::complex<double>> front_harmonics_at(const FrontSpectrum& phi, double y1,
                                                     double y2, int dy1 = 0, int dy2 = 0);

// All theta-harmonics of phi on the uniform N x N y' grid (nodes 2 pi a / N),
// row-major in (y1, y2); layout out[a * (2K+1) + (k+K)], k = 0 slice zero,
// negative k filled by conjugation. Requires N >= 2J+1.
std::vector<std::complex<double>> front_node_harmonics(const FrontSpectrum& phi, int N);

}  // namespace pvsurf
