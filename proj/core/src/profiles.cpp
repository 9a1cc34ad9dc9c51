#include "pvsurf/profiles.hpp"

#include <cmath>
#include <stdexcept>

#include "pvsurf/parallel.hpp"

namespace pvsurf {

namespace {

using cplx = std::complex<double>;
constexpr cplx iu(0.0, 1.0);

struct LocalCoeffs {
  double ap, bp, cp, am1, am2, bm;
};

LocalCoeffs local_coeffs(const ReferenceState& st, const Vec2& xi, double tau) {
  LocalCoeffs c;
  c.ap = xi[0] * st.u0[0] + xi[1] * st.u0[1];
  c.bp = xi[0] * st.B0[0] + xi[1] * st.B0[1];
  c.cp = tau + c.ap;
  c.am1 = st.nu * tau * st.H0[0] + xi[1] * st.E3_0;
  c.am2 = st.nu * tau * st.H0[1] - xi[0] * st.E3_0;
  c.bm = xi[0] * st.H0[0] + xi[1] * st.H0[1];
  return c;
}

int signum(int k) {
  if (k == 0) throw std::domain_error("eigenvector requested at k == 0");
  return k > 0 ? 1 : -1;
}

double root_factor(const DerivedCoefficients& c) {
  const double r = 1.0 - c.nu * c.nu * c.tau * c.tau;
  if (r <= 0.0) throw std::domain_error("eigenvector requested with nu^2 tau^2 >= 1");
  return std::sqrt(r);
}

}  // namespace

SystemMatrices build_matrices(const ReferenceState& state, const Vec2& xi, double tau) {
  detail::validate_state(state);
  const double u1 = state.u0[0], u2 = state.u0[1];
  const double B1 = state.B0[0], B2 = state.B0[1];
  const double x1 = xi[0], x2 = xi[1];
  const double nu = state.nu;
  SystemMatrices m;

  m.A_plus_0.setZero();
  for (int i = 0; i < 6; ++i) m.A_plus_0(i, i) = 1.0;

  m.A_plus_1 << 2 * u1, 0, 0, -2 * B1, 0, 0, 1,
      u2, u1, 0, -B2, -B1, 0, 0,
      0, 0, u1, 0, 0, -B1, 0,
      0, 0, 0, 0, 0, 0, 0,
      B2, -B1, 0, -u2, u1, 0, 0,
      0, 0, -B1, 0, 0, u1, 0,
      1, 0, 0, 0, 0, 0, 0;

  m.A_plus_2 << u2, u1, 0, -B2, -B1, 0, 0,
      0, 2 * u2, 0, 0, -2 * B2, 0, 1,
      0, 0, u2, 0, 0, -B2, 0,
      -B2, B1, 0, u2, -u1, 0, 0,
      0, 0, 0, 0, 0, 0, 0,
      0, 0, -B2, 0, 0, u2, 0,
      0, 1, 0, 0, 0, 0, 0;

  m.A_plus_3 << 0, 0, u1, 0, 0, -B1, 0,
      0, 0, u2, 0, 0, -B2, 0,
      0, 0, 0, 0, 0, 0, 1,
      0, 0, B1, 0, 0, -u1, 0,
      0, 0, B2, 0, 0, -u2, 0,
      0, 0, 0, 0, 0, 0, 0,
      0, 0, 1, 0, 0, 0, 0;

  m.A_minus_0 = nu * Matrix6d::Identity();
  auto curl_pair = [](double a00, double a01, double a02, double a10, double a11, double a12,
                      double a20, double a21, double a22) {
    Matrix6d A = Matrix6d::Zero();
    Eigen::Matrix3d M;
    M << a00, a01, a02, a10, a11, a12, a20, a21, a22;
    A.block<3, 3>(0, 3) = M;
    A.block<3, 3>(3, 0) = -M;
    return A;
  };
  m.A_minus_1 = curl_pair(0, 0, 0, 0, 0, -1, 0, 1, 0);
  m.A_minus_2 = curl_pair(0, 0, 1, 0, 0, 0, -1, 0, 0);
  m.A_minus_3 = curl_pair(0, -1, 0, 1, 0, 0, 0, 0, 0);

  const LocalCoeffs c = local_coeffs(state, xi, tau);
  m.scrA_plus << c.cp + x1 * u1, x2 * u1, 0, -(c.bp + x1 * B1), -x2 * B1, 0, x1,
      x1 * u2, c.cp + x2 * u2, 0, -x1 * B2, -(c.bp + x2 * B2), 0, x2,
      0, 0, c.cp, 0, 0, -c.bp, 0,
      -x2 * B2, x2 * B1, 0, c.cp - x1 * u1, -x2 * u1, 0, 0,
      x1 * B2, -x1 * B1, 0, -x1 * u2, c.cp - x2 * u2, 0, 0,
      0, 0, -c.bp, 0, 0, c.cp, 0,
      x1, x2, 0, 0, 0, 0, 0;

  const double nt = nu * tau;
  m.scrA_minus << nt, 0, 0, 0, 0, x2,
      0, nt, 0, 0, 0, -x1,
      0, 0, nt, -x2, x1, 0,
      0, 0, -x2, nt, 0, 0,
      0, 0, x1, 0, nt, 0,
      x2, -x1, 0, 0, 0, nt;

  m.B_plus.setZero();
  m.B_plus(0, 2) = 1.0;
  m.B_plus(1, 5) = 1.0;
  m.B_plus(5, 6) = 1.0;
  m.B_minus.setZero();
  m.B_minus(2, 2) = 1.0;
  m.B_minus(3, 4) = 1.0;
  m.B_minus(4, 3) = -1.0;
  m.B_minus(5, 0) = -state.H0[0];
  m.B_minus(5, 1) = -state.H0[1];
  m.B_minus(5, 5) = state.E3_0;
  m.b_vec << -c.cp, -c.bp, -c.bm, c.am1, c.am2, 0.0;
  return m;
}

SystemMatrices build_matrices(const ReferenceState& state, const FrequencyTriple& freq) {
  return build_matrices(state, freq.xi, freq.tau);
}

Vector7cd eigvec_plus(int k, const DerivedCoefficients& c) {
  const double s = signum(k);
  Vector7cd r;
  r << c.xi[0] * c.c_plus, c.xi[1] * c.c_plus, iu * s * c.c_plus,
      c.xi[0] * c.b_plus, c.xi[1] * c.b_plus, iu * s * c.b_plus,
      c.b_plus * c.b_plus - c.c_plus * c.c_plus;
  return r;
}

Vector6cd eigvec_minus_1(int k, const DerivedCoefficients& c) {
  const double s = signum(k);
  const double rt = root_factor(c);
  const double nt = c.nu * c.tau;
  Vector6cd r;
  r << rt * nt, 0.0, -iu * s * nt * c.xi[0], -iu * s * c.xi[0] * c.xi[1],
      iu * s * (nt * nt - c.xi[1] * c.xi[1]), -rt * c.xi[1];
  return r;
}

Vector6cd eigvec_minus_2(int k, const DerivedCoefficients& c) {
  const double s = signum(k);
  const double rt = root_factor(c);
  const double nt = c.nu * c.tau;
  Vector6cd r;
  r << 0.0, rt * nt, -iu * s * nt * c.xi[1], -iu * s * (nt * nt - c.xi[0] * c.xi[0]),
      iu * s * c.xi[0] * c.xi[1], rt * c.xi[0];
  return r;
}

Vector6cd eigvec_minus(int k, const DerivedCoefficients& c) {
  return c.iota1 * eigvec_minus_1(k, c) + c.iota2 * eigvec_minus_2(k, c);
}

Vector7cd adjoint_plus(int k, const DerivedCoefficients& c) {
  const double s = signum(k);
  Vector7cd l;
  l << c.xi[0] * c.tau, c.xi[1] * c.tau, iu * s * c.tau, 2 * c.xi[0] * c.b_plus,
      2 * c.xi[1] * c.b_plus, iu * (s * 2.0 * c.b_plus), -c.tau * (c.a_plus + c.c_plus);
  return l;
}

Vector6cd adjoint_minus(int k, const DerivedCoefficients& c) {
  const double s = signum(k);
  const double rt = root_factor(c);
  const double nt = c.nu * c.tau;
  Vector6cd r;  // closed form of the combined vacuum direction
  r << (nt * c.a_minus_1 - c.xi[0] * c.b_minus) / rt,
      (nt * c.a_minus_2 - c.xi[1] * c.b_minus) / rt, iu * s * c.b_minus, iu * s * c.a_minus_2,
      -iu * s * c.a_minus_1, (c.xi[0] * c.a_minus_2 - c.xi[1] * c.a_minus_1) / rt;
  return -r / c.nu;
}

namespace {

double bump(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double bump_deriv(double t) { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }

}  // namespace

double CutoffSpec::value(double y) const {
  const double a = std::abs(y);
  if (a <= inner) return 1.0;
  if (a >= outer) return 0.0;
  const double s = (a - inner) / (outer - inner);
  const double n = bump(1.0 - s), d = bump(s);
  return n / (n + d);
}

double CutoffSpec::derivative(double y) const {
  const double a = std::abs(y);
  if (a <= inner || a >= outer) return 0.0;
  const double s = (a - inner) / (outer - inner);
  const double n = bump(1.0 - s), d = bump(s);
  const double dchi_ds = (-bump_deriv(1.0 - s) * d - n * bump_deriv(s)) / ((n + d) * (n + d));
  return dchi_ds * (y >= 0.0 ? 1.0 : -1.0) / (outer - inner);
}

LeadingFields reconstruct_leading(const Background& bg, const FrontSpectrum& front,
                                  const ProfileGrid& grid, const CutoffSpec& cutoff) {
  for (double v : grid.Y3_plasma)
    if (v < 0.0) throw std::invalid_argument("reconstruct_leading: Y3_plasma must be >= 0");
  for (double v : grid.Y3_vacuum)
    if (v > 0.0) throw std::invalid_argument("reconstruct_leading: Y3_vacuum must be <= 0");

  const int K = front.K;
  const std::size_t n1 = grid.y1.size(), n2 = grid.y2.size(), n3 = grid.y3.size();
  const std::size_t np = grid.Y3_plasma.size(), nv = grid.Y3_vacuum.size();
  const std::size_t nt = grid.theta.size();
  const double rt = std::sqrt(1.0 - bg.coeffs.nu * bg.coeffs.nu * bg.coeffs.tau * bg.coeffs.tau);
  const Vector7cd Rp = eigvec_plus(1, bg.coeffs);
  const Vector6cd Rm = eigvec_minus(1, bg.coeffs);

  LeadingFields out;
  out.U1.assign(n1 * n2 * n3 * np * nt * 7, cplx(0.0, 0.0));
  out.V1.assign(n1 * n2 * n3 * nv * nt * 6, cplx(0.0, 0.0));

  parallel_for(n1 * n2, [&](std::size_t nb, std::size_t ne) {
    for (std::size_t node = nb; node < ne; ++node) {
      const std::size_t i1 = node / n2, i2 = node % n2;
      const std::vector<cplx> ph =
          front_harmonics_at(front, grid.y1[i1], grid.y2[i2]);  // index k, 1..K
      for (std::size_t i3 = 0; i3 < n3; ++i3) {
        const double chi = cutoff.value(grid.y3[i3]);
        for (std::size_t i4 = 0; i4 < np; ++i4) {
          const double e = std::exp(-grid.Y3_plasma[i4]);
          for (std::size_t i5 = 0; i5 < nt; ++i5) {
            const cplx w = e * std::polar(1.0, grid.theta[i5]);
            cplx p(0.0, 0.0);  // Horner: sum_{k>=1} k phi~(k) w^k
            for (int k = K; k >= 1; --k) p = (p + double(k) * ph[std::size_t(k)]) * w;
            const std::size_t base =
                ((((i1 * n2 + i2) * n3 + i3) * np + i4) * nt + i5) * 7;
            for (int comp = 0; comp < 7; ++comp)
              out.U1[base + std::size_t(comp)] = 2.0 * chi * std::real(p * Rp[comp]);
          }
        }
        for (std::size_t i4 = 0; i4 < nv; ++i4) {
          const double e = std::exp(rt * grid.Y3_vacuum[i4]);
          for (std::size_t i5 = 0; i5 < nt; ++i5) {
            const cplx w = e * std::polar(1.0, grid.theta[i5]);
            cplx p(0.0, 0.0);
            for (int k = K; k >= 1; --k) p = (p + double(k) * ph[std::size_t(k)]) * w;
            const std::size_t base =
                ((((i1 * n2 + i2) * n3 + i3) * nv + i4) * nt + i5) * 6;
            for (int comp = 0; comp < 6; ++comp)
              out.V1[base + std::size_t(comp)] = 2.0 * chi * std::real(p * Rm[comp]);
          }
        }
      }
    }
  });
  return out;
}

double leading_boundary_residual(const FrontSpectrum& front, const DerivedCoefficients& c,
                                 const SystemMatrices& m, int n_theta) {
  const int K = front.K;
  const int N = collocation_size(front.J);
  const std::vector<cplx> nodes = front_node_harmonics(front, N);

  const Vector7cd Rp = eigvec_plus(1, c);
  const Vector6cd Rm = eigvec_minus(1, c);
  Vector6cd beta = m.B_plus.cast<cplx>() * Rp + m.B_minus.cast<cplx>() * Rm +
                   iu * m.b_vec.cast<cplx>();

  const std::size_t nn = std::size_t(N) * N;
  std::vector<double> node_max(nn, 0.0);
  parallel_for(nn, [&](std::size_t ab, std::size_t ae) {
    for (std::size_t a = ab; a < ae; ++a) {
      double mx = 0.0;
      for (int it = 0; it < n_theta; ++it) {
        const cplx w = std::polar(1.0, 2.0 * M_PI * it / n_theta);
        cplx s(0.0, 0.0);
        for (int k = K; k >= 1; --k)
          s = (s + double(k) * nodes[a * (2 * K + 1) + std::size_t(K + k)]) * w;
        for (int row = 0; row < 6; ++row)
          mx = std::max(mx, std::abs(2.0 * std::real(s * beta[row])));
      }
      node_max[a] = mx;
    }
  });
  double sup = 0.0;
  for (double v : node_max) sup = std::max(sup, v);
  return sup;
}

FastResidualReport fast_pde_residual_leading(const Background& bg, const FrontSpectrum& front,
                                             std::optional<double> op_tau, int n_Y3,
                                             int n_theta) {
  const int K = front.K;
  const int N = collocation_size(front.J);
  const std::vector<cplx> nodes = front_node_harmonics(front, N);
  const double rt = std::sqrt(1.0 - bg.coeffs.nu * bg.coeffs.nu * bg.coeffs.tau * bg.coeffs.tau);

  const double tau_op = op_tau.value_or(bg.freq.tau);
  const SystemMatrices m = build_matrices(bg.state, bg.freq.xi, tau_op);
  const Vector7cd Rp = eigvec_plus(1, bg.coeffs);
  const Vector6cd Rm = eigvec_minus(1, bg.coeffs);

  // Per-harmonic operator actions; the mode factor k^2 phi~ w^k is shared.
  const Vector7cd Dp = (-m.A_plus_3.cast<cplx>() + iu * m.scrA_plus.cast<cplx>()) * Rp;
  const Vector6cd Dv = (rt * m.A_minus_3.cast<cplx>() + iu * m.scrA_minus.cast<cplx>()) * Rm;
  const cplx x1 = bg.freq.xi[0], x2 = bg.freq.xi[1];
  const cplx div_u = iu * x1 * Rp[0] + iu * x2 * Rp[1] - Rp[2];
  const cplx div_B = iu * x1 * Rp[3] + iu * x2 * Rp[4] - Rp[5];
  const cplx div_H = iu * x1 * Rm[0] + iu * x2 * Rm[1] + rt * Rm[2];
  const cplx div_E = iu * x1 * Rm[3] + iu * x2 * Rm[4] + rt * Rm[5];

  const std::size_t nn = std::size_t(N) * N;
  std::vector<std::array<double, 17>> node_max(nn);
  parallel_for(nn, [&](std::size_t ab, std::size_t ae) {
    for (std::size_t a = ab; a < ae; ++a) {
      std::array<double, 17> mx{};
      for (int iy = 0; iy < n_Y3; ++iy) {
        const double Y = 3.0 * iy / std::max(1, n_Y3 - 1);
        const double ep = std::exp(-Y), ev = std::exp(-rt * Y);
        for (int it = 0; it < n_theta; ++it) {
          const cplx ph = std::polar(1.0, 2.0 * M_PI * it / n_theta);
          const cplx wp = ep * ph, wv = ev * ph;
          cplx sp(0.0, 0.0), sv(0.0, 0.0);
          for (int k = K; k >= 1; --k) {
            const cplx kk = double(k) * double(k) * nodes[a * (2 * K + 1) + std::size_t(K + k)];
            sp = (sp + kk) * wp;
            sv = (sv + kk) * wv;
          }
          for (int r = 0; r < 7; ++r)
            mx[std::size_t(r)] = std::max(mx[std::size_t(r)], std::abs(2.0 * std::real(sp * Dp[r])));
          for (int r = 0; r < 6; ++r)
            mx[std::size_t(7 + r)] =
                std::max(mx[std::size_t(7 + r)], std::abs(2.0 * std::real(sv * Dv[r])));
          mx[13] = std::max(mx[13], std::abs(2.0 * std::real(sp * div_u)));
          mx[14] = std::max(mx[14], std::abs(2.0 * std::real(sp * div_B)));
          mx[15] = std::max(mx[15], std::abs(2.0 * std::real(sv * div_H)));
          mx[16] = std::max(mx[16], std::abs(2.0 * std::real(sv * div_E)));
        }
      }
      node_max[a] = mx;
    }
  });

  FastResidualReport rep;
  for (const auto& mx : node_max) {
    for (int r = 0; r < 7; ++r) rep.plasma[std::size_t(r)] = std::max(rep.plasma[std::size_t(r)], mx[std::size_t(r)]);
    for (int r = 0; r < 6; ++r)
      rep.vacuum[std::size_t(r)] = std::max(rep.vacuum[std::size_t(r)], mx[std::size_t(7 + r)]);
    for (int r = 0; r < 4; ++r)
      rep.divergences[std::size_t(r)] = std::max(rep.divergences[std::size_t(r)], mx[std::size_t(13 + r)]);
  }
  for (double v : rep.plasma) rep.max_abs = std::max(rep.max_abs, v);
  for (double v : rep.vacuum) rep.max_abs = std::max(rep.max_abs, v);
  for (double v : rep.divergences) rep.max_abs = std::max(rep.max_abs, v);
  return rep;
}

}  // namespace pvsurf
