#include "pvsurf/amplitude.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "pvsurf/fft.hpp"
#include "pvsurf/parallel.hpp"

namespace pvsurf {

namespace {

using cplx = std::complex<double>;

int wrap_index(int j, int n) { return ((j % n) + n) % n; }

void check_shape(const FrontSpectrum& phi) {
  const std::size_t want =
      std::size_t(2 * phi.J + 1) * std::size_t(2 * phi.J + 1) * std::size_t(2 * phi.K + 1);
  if (phi.J < 0 || phi.K < 1 || phi.coeffs.size() != want)
    throw std::invalid_argument("FrontSpectrum has inconsistent dimensions");
}

}  // namespace

int collocation_size(int J) {
  return std::max(4, int(fft::next_pow2(std::size_t(3 * J + 1))));
}

FrontSpectrum make_front(int J, int K, const std::vector<ModeSeed>& seeds, double time) {
  if (J < 0 || K < 1) throw std::invalid_argument("make_front: need J >= 0, K >= 1");
  FrontSpectrum phi;
  phi.J = J;
  phi.K = K;
  phi.time = time;
  phi.coeffs.assign(std::size_t(2 * J + 1) * (2 * J + 1) * (2 * K + 1), cplx(0.0, 0.0));
  for (const ModeSeed& s : seeds) {
    if (s.k == 0) throw std::invalid_argument("make_front: seed with k == 0");
    if (std::abs(s.j1) > J || std::abs(s.j2) > J || std::abs(s.k) > K)
      throw std::invalid_argument("make_front: seed mode outside truncation");
    const cplx v(s.re, s.im);
    phi.at(s.j1, s.j2, s.k) = v;
    phi.at(-s.j1, -s.j2, -s.k) = std::conj(v);
  }
  return phi;
}

double hs_norm(const FrontSpectrum& phi, double s) {
  check_shape(phi);
  double acc = 0.0;
  for (int j1 = -phi.J; j1 <= phi.J; ++j1)
    for (int j2 = -phi.J; j2 <= phi.J; ++j2)
      for (int k = -phi.K; k <= phi.K; ++k) {
        const double w = std::pow(1.0 + double(j1) * j1 + double(j2) * j2 + double(k) * k, s);
        acc += w * std::norm(phi.at(j1, j2, k));
      }
  return std::sqrt(acc);
}

double existence_time_estimate(const FrontSpectrum& phi0, double k_const) {
  const double h4 = hs_norm(phi0, 4.0);
  if (h4 == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (k_const * h4);
}

double default_dt(const DerivedCoefficients& c, int K) {
  const double vmax =
      std::max(std::abs(c.transport_y[0]), std::abs(c.transport_y[1])) / std::abs(c.transport_t);
  if (vmax == 0.0) return 1e-3;
  return std::min(1e-3, 0.1 / (double(K) * vmax));
}

void project_reality(FrontSpectrum& phi) {
  check_shape(phi);
  for (int j1 = -phi.J; j1 <= phi.J; ++j1)
    for (int j2 = -phi.J; j2 <= phi.J; ++j2)
      for (int k = 1; k <= phi.K; ++k) {
        const cplx a = phi.at(j1, j2, k);
        const cplx b = phi.at(-j1, -j2, -k);
        const cplx m = 0.5 * (a + std::conj(b));
        phi.at(j1, j2, k) = m;
        phi.at(-j1, -j2, -k) = std::conj(m);
      }
}

void project_zero_mode(FrontSpectrum& phi) {
  check_shape(phi);
  for (int j1 = -phi.J; j1 <= phi.J; ++j1)
    for (int j2 = -phi.J; j2 <= phi.J; ++j2) phi.at(j1, j2, 0) = cplx(0.0, 0.0);
}

void dealias_cut(FrontSpectrum& phi) {
  check_shape(phi);
  const int kc = (2 * phi.K) / 3;  // keep |k| <= kc
  for (int j1 = -phi.J; j1 <= phi.J; ++j1)
    for (int j2 = -phi.J; j2 <= phi.J; ++j2)
      for (int k = -phi.K; k <= phi.K; ++k)
        if (std::abs(k) > kc) phi.at(j1, j2, k) = cplx(0.0, 0.0);
}

std::vector<std::complex<double>> front_harmonics_at(const FrontSpectrum& phi, double y1,
                                                     double y2, int dy1, int dy2) {
  check_shape(phi);
  std::vector<cplx> out(std::size_t(phi.K) + 1, cplx(0.0, 0.0));
  for (int j1 = -phi.J; j1 <= phi.J; ++j1)
    for (int j2 = -phi.J; j2 <= phi.J; ++j2) {
      cplx factor = std::polar(1.0, j1 * y1 + j2 * y2);
      for (int d = 0; d < dy1; ++d) factor *= cplx(0.0, double(j1));
      for (int d = 0; d < dy2; ++d) factor *= cplx(0.0, double(j2));
      for (int k = 1; k <= phi.K; ++k) out[std::size_t(k)] += factor * phi.at(j1, j2, k);
    }
  return out;
}

std::vector<std::complex<double>> front_node_harmonics(const FrontSpectrum& phi, int N) {
  check_shape(phi);
  if (N < 2 * phi.J + 1)
    throw std::invalid_argument("front_node_harmonics: grid too coarse for mode content");
  const int J = phi.J, K = phi.K;
  const std::size_t nn = std::size_t(N) * N;
  std::vector<cplx> slices(nn * (2 * K + 1), cplx(0.0, 0.0));
  parallel_for(K, [&](std::size_t kb, std::size_t ke) {
    std::vector<cplx> grid(nn);
    for (std::size_t kk = kb; kk < ke; ++kk) {
      const int k = int(kk) + 1;
      std::fill(grid.begin(), grid.end(), cplx(0.0, 0.0));
      for (int j1 = -J; j1 <= J; ++j1)
        for (int j2 = -J; j2 <= J; ++j2)
          grid[std::size_t(wrap_index(j1, N)) * N + wrap_index(j2, N)] = phi.at(j1, j2, k);
      fft::backward_2d(grid.data(), N, N);  // unnormalized: sum c_j e^{+i j.y}
      for (std::size_t a = 0; a < nn; ++a) {
        slices[a * (2 * K + 1) + std::size_t(K + k)] = grid[a];
        slices[a * (2 * K + 1) + std::size_t(K - k)] = std::conj(grid[a]);
      }
    }
  });
  return slices;
}

namespace {

// Inverse of front_node_harmonics for one harmonic k: gathers the node
// values, transforms, truncates to |j| <= J, writes into out.at(j1, j2, k)
// and the conjugate slot.
void spectrum_from_nodes(const std::vector<cplx>& qnodes, int N, int k, FrontSpectrum& out) {
  const int J = out.J, K = out.K;
  const std::size_t nn = std::size_t(N) * N;
  std::vector<cplx> grid(nn);
  for (std::size_t a = 0; a < nn; ++a) grid[a] = qnodes[a * (2 * K + 1) + std::size_t(K + k)];
  fft::forward_2d(grid.data(), N, N);
  const double scale = 1.0 / double(nn);
  for (int j1 = -J; j1 <= J; ++j1)
    for (int j2 = -J; j2 <= J; ++j2) {
      const cplx v = scale * grid[std::size_t(wrap_index(j1, N)) * N + wrap_index(j2, N)];
      out.at(j1, j2, k) = v;
      out.at(-j1, -j2, -k) = std::conj(v);
    }
}

// Shared skeleton for the nonlinear rhs and its linearization. quad(a) must
// return the kernel quadratic output (size 4K+1, index k+2K) for node a.
template <class Quad>
FrontSpectrum rhs_skeleton(const DerivedCoefficients& c, const FrontSpectrum& lin_arg,
                           double quad_factor, const FrontSpectrum* forcing, bool need_quad,
                           Quad&& quad) {
  const int J = lin_arg.J, K = lin_arg.K;
  const double tt = c.transport_t;
  if (tt == 0.0) throw std::domain_error("amplitude rhs: transport_t == 0");

  FrontSpectrum out;
  out.J = J;
  out.K = K;
  out.time = lin_arg.time;
  out.coeffs.assign(lin_arg.coeffs.size(), cplx(0.0, 0.0));

  FrontSpectrum qhat;  // spectral coefficients of the quadratic term
  if (need_quad) {
    const int N = collocation_size(J);
    const std::size_t nn = std::size_t(N) * N;
    std::vector<cplx> qnodes(nn * (2 * K + 1), cplx(0.0, 0.0));
    parallel_for(nn, [&](std::size_t ab, std::size_t ae) {
      for (std::size_t a = ab; a < ae; ++a) {
        const std::vector<cplx> q = quad(a);
        for (int k = 1; k <= K; ++k) {
          qnodes[a * (2 * K + 1) + std::size_t(K + k)] = q[std::size_t(2 * K + k)];
          qnodes[a * (2 * K + 1) + std::size_t(K - k)] = std::conj(q[std::size_t(2 * K + k)]);
        }
      }
    });
    qhat.J = J;
    qhat.K = K;
    qhat.coeffs.assign(lin_arg.coeffs.size(), cplx(0.0, 0.0));
    parallel_for(K, [&](std::size_t kb, std::size_t ke) {
      for (std::size_t kk = kb; kk < ke; ++kk)
        spectrum_from_nodes(qnodes, N, int(kk) + 1, qhat);
    });
  }

  const cplx iunit(0.0, 1.0);
  for (int j1 = -J; j1 <= J; ++j1)
    for (int j2 = -J; j2 <= J; ++j2)
      for (int k = 1; k <= K; ++k) {
        const double ty = c.transport_y[0] * j1 + c.transport_y[1] * j2;
        cplx num = -iunit * ty * lin_arg.at(j1, j2, k);
        if (need_quad)
          num -= iunit * (quad_factor * c.nl_coeff) * double(k > 0 ? 1 : -1) * qhat.at(j1, j2, k);
        if (forcing) num += forcing->at(j1, j2, k);
        const cplx v = num / tt;
        out.at(j1, j2, k) = v;
        out.at(-j1, -j2, -k) = std::conj(v);
      }
  return out;
}

}  // namespace

FrontSpectrum amplitude_rhs(const DerivedCoefficients& c, const FrontSpectrum& phi,
                            const SolverConfig& cfg) {
  check_shape(phi);
  const bool need_quad = (c.nl_coeff != 0.0);
  const int N = collocation_size(phi.J);
  std::vector<cplx> slices;
  if (need_quad) slices = front_node_harmonics(phi, N);
  const KernelPlan plan{phi.K, cfg.kernel_mode, cfg.kernel_nodes};
  const int K = phi.K;
  return rhs_skeleton(c, phi, 1.0, nullptr, need_quad, [&](std::size_t a) {
    std::vector<cplx> slice(slices.begin() + a * (2 * K + 1),
                            slices.begin() + (a + 1) * (2 * K + 1));
    return quadratic_sum_all(slice, plan);
  });
}

FrontSpectrum linearized_rhs(const DerivedCoefficients& c, const FrontSpectrum& phi,
                             const FrontSpectrum& corr, const FrontSpectrum* forcing,
                             const SolverConfig& cfg) {
  check_shape(phi);
  check_shape(corr);
  if (phi.J != corr.J || phi.K != corr.K)
    throw std::invalid_argument("linearized_rhs: mismatched truncations");
  const bool need_quad = (c.nl_coeff != 0.0);
  const int N = collocation_size(phi.J);
  std::vector<cplx> pslices, cslices;
  if (need_quad) {
    pslices = front_node_harmonics(phi, N);
    cslices = front_node_harmonics(corr, N);
  }
  const KernelPlan plan{phi.K, cfg.kernel_mode, cfg.kernel_nodes};
  const int K = phi.K;
  return rhs_skeleton(c, corr, 2.0, forcing, need_quad, [&](std::size_t a) {
    std::vector<cplx> pa(pslices.begin() + a * (2 * K + 1),
                         pslices.begin() + (a + 1) * (2 * K + 1));
    std::vector<cplx> ca(cslices.begin() + a * (2 * K + 1),
                         cslices.begin() + (a + 1) * (2 * K + 1));
    return quadratic_cross_all(pa, ca, plan);
  });
}

namespace {

bool any_nan(const FrontSpectrum& phi) {
  for (const cplx& v : phi.coeffs)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return true;
  return false;
}

void axpy(FrontSpectrum& y, double alpha, const FrontSpectrum& x) {
  for (std::size_t i = 0; i < y.coeffs.size(); ++i) y.coeffs[i] += alpha * x.coeffs[i];
}

}  // namespace

SolveResult integrate(const DerivedCoefficients& c, FrontSpectrum phi0, const SolverConfig& cfg,
                      const std::function<void(const FrontSpectrum&)>& on_step) {
  check_shape(phi0);
  if (cfg.dt <= 0.0) throw std::invalid_argument("integrate: dt must be positive");
  project_zero_mode(phi0);
  project_reality(phi0);
  if (cfg.dealias) dealias_cut(phi0);

  SolveResult res;
  res.h4_initial = hs_norm(phi0, 4.0);
  res.front = std::move(phi0);
  if (on_step) on_step(res.front);

  double t = res.front.time;
  const double t_stop = t + cfg.t_end;
  while (t < t_stop - 1e-12 * std::max(1.0, std::abs(t_stop))) {
    const double h = std::min(cfg.dt, t_stop - t);
    const FrontSpectrum k1 = amplitude_rhs(c, res.front, cfg);
    FrontSpectrum y2 = res.front;
    axpy(y2, 0.5 * h, k1);
    if (cfg.dealias) dealias_cut(y2);
    const FrontSpectrum k2 = amplitude_rhs(c, y2, cfg);
    FrontSpectrum y3 = res.front;
    axpy(y3, 0.5 * h, k2);
    if (cfg.dealias) dealias_cut(y3);
    const FrontSpectrum k3 = amplitude_rhs(c, y3, cfg);
    FrontSpectrum y4 = res.front;
    axpy(y4, h, k3);
    if (cfg.dealias) dealias_cut(y4);
    const FrontSpectrum k4 = amplitude_rhs(c, y4, cfg);

    axpy(res.front, h / 6.0, k1);
    axpy(res.front, h / 3.0, k2);
    axpy(res.front, h / 3.0, k3);
    axpy(res.front, h / 6.0, k4);
    t += h;
    res.front.time = t;
    project_zero_mode(res.front);
    project_reality(res.front);
    if (cfg.dealias) dealias_cut(res.front);
    ++res.steps;

    if (any_nan(res.front)) {
      res.status = SolveStatus::nan;
      res.h4_final = std::numeric_limits<double>::quiet_NaN();
      return res;
    }
    const double h4 = hs_norm(res.front, 4.0);
    if (res.h4_initial > 0.0 && h4 > cfg.blowup_h4_factor * res.h4_initial) {
      res.status = SolveStatus::blowup;
      res.h4_final = h4;
      return res;
    }
    if (on_step) on_step(res.front);
  }
  res.h4_final = hs_norm(res.front, 4.0);
  return res;
}

}  // namespace pvsurf
