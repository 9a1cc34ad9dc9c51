#include "pvsurf/residual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pvsurf/fft.hpp"
#include "pvsurf/parallel.hpp"

namespace pvsurf {

namespace {

using cplx = std::complex<double>;
constexpr cplx iu(0.0, 1.0);

int wrap_index(int j, int n) { return ((j % n) + n) % n; }

// Positive theta-harmonics (k = 1..K at slot [k]) of phi and of its
// y'-derivative/time-derivative companions on a rectangular uniform grid;
// layout tab[a * (K+1) + k], nodes row-major over (n1, n2).
std::vector<cplx> node_harmonics_rect(const FrontSpectrum& phi, int n1, int n2, int dy1,
                                      int dy2) {
  const int J = phi.J, K = phi.K;
  if (n1 < 2 * J + 1 || n2 < 2 * J + 1)
    throw std::invalid_argument("node_harmonics_rect: grid too coarse for mode content");
  const std::size_t nn = std::size_t(n1) * std::size_t(n2);
  std::vector<cplx> tab(nn * std::size_t(K + 1), cplx(0.0, 0.0));
  parallel_for(std::size_t(K), [&](std::size_t kb, std::size_t ke) {
    std::vector<cplx> grid(nn);
    for (std::size_t kk = kb; kk < ke; ++kk) {
      const int k = int(kk) + 1;
      std::fill(grid.begin(), grid.end(), cplx(0.0, 0.0));
      for (int j1 = -J; j1 <= J; ++j1)
        for (int j2 = -J; j2 <= J; ++j2) {
          cplx c = phi.at(j1, j2, k);
          for (int d = 0; d < dy1; ++d) c *= cplx(0.0, double(j1));
          for (int d = 0; d < dy2; ++d) c *= cplx(0.0, double(j2));
          grid[std::size_t(wrap_index(j1, n1)) * std::size_t(n2) + std::size_t(wrap_index(j2, n2))] = c;
        }
      fft::backward_2d(grid.data(), n1, n2);
      for (std::size_t a = 0; a < nn; ++a) tab[a * std::size_t(K + 1) + std::size_t(k)] = grid[a];
    }
  });
  return tab;
}

struct HarmonicSlice {
  const cplx* ph = nullptr;  // valid at [1..K]
  const cplx* d1 = nullptr;
  const cplx* d2 = nullptr;
  const cplx* dt = nullptr;
  int K = 0;
};

struct FrontPoint {
  double theta = 0.0;
  cplx z;  // e^{i theta}
  double phi_app = 0.0, dtphi = 0.0, d1phi = 0.0, d2phi = 0.0;
};

FrontPoint front_point(const WkbField& f, const HarmonicSlice& h, double t, double x1,
                       double x2) {
  const double eps = f.eps, tau = f.bg.freq.tau;
  const double xi1 = f.bg.freq.xi[0], xi2 = f.bg.freq.xi[1];
  FrontPoint fp;
  fp.theta = (tau * t + xi1 * x1 + xi2 * x2) / eps;
  fp.z = std::polar(1.0, fp.theta);
  cplx F(0.0, 0.0), Fth(0.0, 0.0), F1(0.0, 0.0), F2(0.0, 0.0), Ft(0.0, 0.0);
  for (int k = h.K; k >= 1; --k) {
    F = (F + h.ph[k]) * fp.z;
    Fth = (Fth + cplx(0.0, double(k)) * h.ph[k]) * fp.z;
    F1 = (F1 + h.d1[k]) * fp.z;
    F2 = (F2 + h.d2[k]) * fp.z;
    Ft = (Ft + h.dt[k]) * fp.z;
  }
  const double Fv = 2.0 * F.real(), Fthv = 2.0 * Fth.real();
  const double F1v = 2.0 * F1.real(), F2v = 2.0 * F2.real(), Ftv = 2.0 * Ft.real();
  const double e2 = eps * eps;
  fp.phi_app = e2 * Fv;
  fp.dtphi = e2 * Ftv + eps * tau * Fthv;
  fp.d1phi = e2 * F1v + eps * xi1 * Fthv;
  fp.d2phi = e2 * F2v + eps * xi2 * Fthv;
  return fp;
}

// One-sided jet at fixed x3 from a precomputed interface point. The chain
// rule runs through y3 = x3 - phi_app, Y3 = y3/eps, theta.
void side_jet(const WkbField& f, const HarmonicSlice& h, const FrontPoint& fp, double x3,
              bool plasma, const cplx* R, const double* base, int ncomp, double* value,
              double* dtv, double* dx1v, double* dx2v, double* dx3v) {
  const double eps = f.eps, tau = f.bg.freq.tau;
  const double xi1 = f.bg.freq.xi[0], xi2 = f.bg.freq.xi[1];
  const double nu = f.bg.coeffs.nu;
  const double rt = std::sqrt(1.0 - nu * nu * tau * tau);
  const double y3 = x3 - fp.phi_app;
  const double Y3 = y3 / eps;
  const double chi = f.cutoff.value(y3);
  const double chip = f.cutoff.derivative(y3);
  const double decay = plasma ? std::exp(-Y3) : std::exp(rt * Y3);
  const cplx w = decay * fp.z;

  cplx P0(0.0, 0.0), P0t(0.0, 0.0), P01(0.0, 0.0), P02(0.0, 0.0), S2(0.0, 0.0);
  for (int k = h.K; k >= 1; --k) {
    const double kd = double(k);
    P0 = (P0 + kd * h.ph[k]) * w;
    P0t = (P0t + kd * h.dt[k]) * w;
    P01 = (P01 + kd * h.d1[k]) * w;
    P02 = (P02 + kd * h.d2[k]) * w;
    S2 = (S2 + kd * kd * h.ph[k]) * w;
  }
  const cplx PY = plasma ? -S2 : rt * S2;
  const cplx Pth = iu * S2;

  const cplx A_val = eps * chi * P0;
  const cplx A_t = eps * chi * P0t - eps * fp.dtphi * chip * P0 - fp.dtphi * chi * PY +
                   tau * chi * Pth;
  const cplx A_1 = eps * chi * P01 - eps * fp.d1phi * chip * P0 - fp.d1phi * chi * PY +
                   xi1 * chi * Pth;
  const cplx A_2 = eps * chi * P02 - eps * fp.d2phi * chip * P0 - fp.d2phi * chi * PY +
                   xi2 * chi * Pth;
  const cplx A_3 = eps * chip * P0 + chi * PY;
  for (int c = 0; c < ncomp; ++c) {
    value[c] = base[c] + 2.0 * std::real(A_val * R[c]);
    dtv[c] = 2.0 * std::real(A_t * R[c]);
    dx1v[c] = 2.0 * std::real(A_1 * R[c]);
    dx2v[c] = 2.0 * std::real(A_2 * R[c]);
    dx3v[c] = 2.0 * std::real(A_3 * R[c]);
  }
}

struct EigenData {
  std::array<cplx, 7> Rp;
  std::array<double, 7> base_p;
  std::array<cplx, 6> Rm;
  std::array<double, 6> base_v;
};

EigenData eigen_data(const Background& bg) {
  EigenData d;
  const Vector7cd rp = eigvec_plus(1, bg.coeffs);
  const Vector6cd rm = eigvec_minus(1, bg.coeffs);
  for (int i = 0; i < 7; ++i) d.Rp[std::size_t(i)] = rp[i];
  for (int i = 0; i < 6; ++i) d.Rm[std::size_t(i)] = rm[i];
  const ReferenceState& st = bg.state;
  const double q0 = 0.5 * (st.H0[0] * st.H0[0] + st.H0[1] * st.H0[1]) -
                    0.5 * st.E3_0 * st.E3_0;
  d.base_p = {st.u0[0], st.u0[1], 0.0, st.B0[0], st.B0[1], 0.0, q0};
  d.base_v = {st.H0[0], st.H0[1], 0.0, 0.0, 0.0, st.E3_0};
  return d;
}

// General-point harmonic bundle (direct sums); used by the public jet API.
struct OwnedHarmonics {
  std::vector<cplx> ph, d1, d2, dt;
  HarmonicSlice slice() const {
    return {ph.data(), d1.data(), d2.data(), dt.data(), int(ph.size()) - 1};
  }
};

OwnedHarmonics harmonics_at(const WkbField& f, double x1, double x2) {
  OwnedHarmonics h;
  h.ph = front_harmonics_at(f.front, x1, x2);
  h.d1 = front_harmonics_at(f.front, x1, x2, 1, 0);
  h.d2 = front_harmonics_at(f.front, x1, x2, 0, 1);
  h.dt = front_harmonics_at(f.front_dot, x1, x2);
  return h;
}

struct NodeTables {
  int n1 = 0, n2 = 0, K = 0;
  std::vector<cplx> ph, d1, d2, dt;
  HarmonicSlice slice(std::size_t a) const {
    const std::size_t off = a * std::size_t(K + 1);
    return {ph.data() + off, d1.data() + off, d2.data() + off, dt.data() + off, K};
  }
};

NodeTables build_tables(const WkbField& f) {
  NodeTables t;
  t.n1 = f.grid.nx1;
  t.n2 = f.grid.nx2;
  t.K = f.front.K;
  t.ph = node_harmonics_rect(f.front, t.n1, t.n2, 0, 0);
  t.d1 = node_harmonics_rect(f.front, t.n1, t.n2, 1, 0);
  t.d2 = node_harmonics_rect(f.front, t.n1, t.n2, 0, 1);
  t.dt = node_harmonics_rect(f.front_dot, t.n1, t.n2, 0, 0);
  return t;
}

}  // namespace

WkbField assemble_wkb(const Background& bg, const FrontSpectrum& front,
                      const FrontSpectrum& front_dot, const WkbGrid& grid,
                      const CutoffSpec& cutoff) {
  if (front.J != front_dot.J || front.K != front_dot.K)
    throw std::invalid_argument("assemble_wkb: front and front_dot truncations differ");
  const double r = std::hypot(double(bg.freq.p), double(bg.freq.q));
  if (std::abs(bg.freq.eps * bg.freq.l * r - 1.0) > 1e-12)
    throw std::invalid_argument("assemble_wkb: eps is not 1/(l |(p,q)|); periodicity breaks");
  if (grid.nx1 < 2 * front.J + 1 || grid.nx2 < 2 * front.J + 1)
    throw std::invalid_argument("assemble_wkb: tangential grid too coarse for front modes");
  if (grid.n3_per_side < 2) throw std::invalid_argument("assemble_wkb: need >= 2 normal nodes");

  WkbField f;
  f.bg = bg;
  f.front = front;
  f.front_dot = front_dot;
  f.eps = bg.freq.eps;
  f.grid = grid;
  f.cutoff = cutoff;
  f.time = front.time;

  const double y_lo = grid.c_band + 0.5;
  const double y_hi = grid.layer_Y3_max;
  if (y_hi <= y_lo)
    throw std::invalid_argument("assemble_wkb: layer_Y3_max must exceed c_band + 0.5");
  if (grid.x3_max <= f.eps * y_hi)
    throw std::invalid_argument("assemble_wkb: x3_max inside the fast layer at this eps");
  const int n_layer = grid.n3_per_side / 2;
  const int n_outer = grid.n3_per_side - n_layer;
  f.x3_plasma.reserve(std::size_t(grid.n3_per_side));
  for (int i = 0; i < n_layer; ++i)
    f.x3_plasma.push_back(f.eps * (y_lo + (y_hi - y_lo) * i / std::max(1, n_layer - 1)));
  for (int i = 0; i < n_outer; ++i)
    f.x3_plasma.push_back(f.eps * y_hi + (grid.x3_max - f.eps * y_hi) * (i + 1) / n_outer);
  f.x3_vacuum.reserve(f.x3_plasma.size());
  for (double v : f.x3_plasma) f.x3_vacuum.push_back(-v);

  const NodeTables tabs = build_tables(f);
  const EigenData ed = eigen_data(bg);
  const std::size_t nn = std::size_t(grid.nx1) * std::size_t(grid.nx2);
  const std::size_t n3 = f.x3_plasma.size();
  f.front_samples.assign(nn, 0.0);
  f.plasma_samples.assign(nn * n3 * 7, 0.0);
  f.vacuum_samples.assign(nn * n3 * 6, 0.0);

  parallel_for(nn, [&](std::size_t ab, std::size_t ae) {
    double val[7], dtv[7], d1v[7], d2v[7], d3v[7];
    for (std::size_t a = ab; a < ae; ++a) {
      const double x1 = 2.0 * M_PI * double(a / std::size_t(f.grid.nx2)) / f.grid.nx1;
      const double x2 = 2.0 * M_PI * double(a % std::size_t(f.grid.nx2)) / f.grid.nx2;
      const HarmonicSlice h = tabs.slice(a);
      const FrontPoint fp = front_point(f, h, f.time, x1, x2);
      f.front_samples[a] = fp.phi_app;
      for (std::size_t i3 = 0; i3 < n3; ++i3) {
        side_jet(f, h, fp, f.x3_plasma[i3], true, ed.Rp.data(), ed.base_p.data(), 7, val, dtv,
                 d1v, d2v, d3v);
        for (int c = 0; c < 7; ++c)
          f.plasma_samples[(a * n3 + i3) * 7 + std::size_t(c)] = val[c];
        side_jet(f, h, fp, f.x3_vacuum[i3], false, ed.Rm.data(), ed.base_v.data(), 6, val, dtv,
                 d1v, d2v, d3v);
        for (int c = 0; c < 6; ++c)
          f.vacuum_samples[(a * n3 + i3) * 6 + std::size_t(c)] = val[c];
      }
    }
  });
  return f;
}

FrontJet front_jet(const WkbField& f, double t, double x1, double x2) {
  const OwnedHarmonics oh = harmonics_at(f, x1, x2);
  const FrontPoint fp = front_point(f, oh.slice(), t, x1, x2);
  return {fp.phi_app, fp.dtphi, fp.d1phi, fp.d2phi};
}

Jet7 eval_plasma_jet(const WkbField& f, double t, double x1, double x2, double x3) {
  const OwnedHarmonics oh = harmonics_at(f, x1, x2);
  const HarmonicSlice h = oh.slice();
  const FrontPoint fp = front_point(f, h, t, x1, x2);
  const EigenData ed = eigen_data(f.bg);
  Jet7 j;
  side_jet(f, h, fp, x3, true, ed.Rp.data(), ed.base_p.data(), 7, j.value.data(), j.dt.data(),
           j.dx1.data(), j.dx2.data(), j.dx3.data());
  return j;
}

Jet6 eval_vacuum_jet(const WkbField& f, double t, double x1, double x2, double x3) {
  const OwnedHarmonics oh = harmonics_at(f, x1, x2);
  const HarmonicSlice h = oh.slice();
  const FrontPoint fp = front_point(f, h, t, x1, x2);
  const EigenData ed = eigen_data(f.bg);
  Jet6 j;
  side_jet(f, h, fp, x3, false, ed.Rm.data(), ed.base_v.data(), 6, j.value.data(), j.dt.data(),
           j.dx1.data(), j.dx2.data(), j.dx3.data());
  return j;
}

std::array<double, 8> plasma_equations(const Jet7& j) {
  const double* u = j.value.data();
  const double* B = j.value.data() + 3;
  std::array<double, 8> r{};
  for (std::size_t i = 0; i < 3; ++i) {
    const double u_grad_u = u[0] * j.dx1[i] + u[1] * j.dx2[i] + u[2] * j.dx3[i];
    const double B_grad_B = B[0] * j.dx1[i + 3] + B[1] * j.dx2[i + 3] + B[2] * j.dx3[i + 3];
    const double u_grad_B = u[0] * j.dx1[i + 3] + u[1] * j.dx2[i + 3] + u[2] * j.dx3[i + 3];
    const double B_grad_u = B[0] * j.dx1[i] + B[1] * j.dx2[i] + B[2] * j.dx3[i];
    const double grad_q = (i == 0) ? j.dx1[6] : (i == 1) ? j.dx2[6] : j.dx3[6];
    r[i] = j.dt[i] + u_grad_u - B_grad_B + grad_q;
    r[i + 3] = j.dt[i + 3] + u_grad_B - B_grad_u;
  }
  r[6] = j.dx1[0] + j.dx2[1] + j.dx3[2];
  r[7] = j.dx1[3] + j.dx2[4] + j.dx3[5];
  return r;
}

std::array<double, 8> vacuum_equations(const Jet6& j, double nu) {
  std::array<double, 8> r{};
  // curl E, with E in components 3..5
  const double cE1 = j.dx2[5] - j.dx3[4];
  const double cE2 = j.dx3[3] - j.dx1[5];
  const double cE3 = j.dx1[4] - j.dx2[3];
  // curl H, with H in components 0..2
  const double cH1 = j.dx2[2] - j.dx3[1];
  const double cH2 = j.dx3[0] - j.dx1[2];
  const double cH3 = j.dx1[1] - j.dx2[0];
  r[0] = nu * j.dt[0] + cE1;
  r[1] = nu * j.dt[1] + cE2;
  r[2] = nu * j.dt[2] + cE3;
  r[3] = nu * j.dt[3] - cH1;
  r[4] = nu * j.dt[4] - cH2;
  r[5] = nu * j.dt[5] - cH3;
  r[6] = j.dx1[0] + j.dx2[1] + j.dx3[2];
  r[7] = j.dx1[3] + j.dx2[4] + j.dx3[5];
  return r;
}

namespace {

struct InteriorAcc {
  std::array<double, 8> sup{};
  std::array<double, 8> ss{};
  long inc_p = 0, exc_p = 0, inc_v = 0, exc_v = 0;
};

struct JumpAcc {
  std::array<double, 6> sup{};  // 5 conditions + consistency
  std::array<double, 5> ss{};
};

}  // namespace

InteriorReport interior_residual(const WkbField& f) {
  const NodeTables tabs = build_tables(f);
  const EigenData ed = eigen_data(f.bg);
  const std::size_t nn = std::size_t(f.grid.nx1) * std::size_t(f.grid.nx2);
  const double band = f.grid.c_band * f.eps;
  const std::size_t nchunks = parallel_chunk_count(nn);
  std::vector<InteriorAcc> acc(nchunks);

  parallel_for_chunks(nn, [&](std::size_t chunk, std::size_t ab, std::size_t ae) {
    InteriorAcc& A = acc[chunk];
    Jet7 jp;
    Jet6 jv;
    for (std::size_t a = ab; a < ae; ++a) {
      const double x1 = 2.0 * M_PI * double(a / std::size_t(f.grid.nx2)) / f.grid.nx1;
      const double x2 = 2.0 * M_PI * double(a % std::size_t(f.grid.nx2)) / f.grid.nx2;
      const HarmonicSlice h = tabs.slice(a);
      const FrontPoint fp = front_point(f, h, f.time, x1, x2);
      for (double x3 : f.x3_plasma) {
        if (std::abs(x3 - fp.phi_app) < band) {
          ++A.exc_p;
          continue;
        }
        side_jet(f, h, fp, x3, true, ed.Rp.data(), ed.base_p.data(), 7, jp.value.data(),
                 jp.dt.data(), jp.dx1.data(), jp.dx2.data(), jp.dx3.data());
        const std::array<double, 8> eq = plasma_equations(jp);
        for (int i = 0; i < 3; ++i) {
          A.sup[0] = std::max(A.sup[0], std::abs(eq[std::size_t(i)]));
          A.ss[0] += eq[std::size_t(i)] * eq[std::size_t(i)];
          A.sup[1] = std::max(A.sup[1], std::abs(eq[std::size_t(i) + 3]));
          A.ss[1] += eq[std::size_t(i) + 3] * eq[std::size_t(i) + 3];
        }
        A.sup[2] = std::max(A.sup[2], std::abs(eq[6]));
        A.ss[2] += eq[6] * eq[6];
        A.sup[3] = std::max(A.sup[3], std::abs(eq[7]));
        A.ss[3] += eq[7] * eq[7];
        ++A.inc_p;
      }
      for (double x3 : f.x3_vacuum) {
        if (std::abs(x3 - fp.phi_app) < band) {
          ++A.exc_v;
          continue;
        }
        side_jet(f, h, fp, x3, false, ed.Rm.data(), ed.base_v.data(), 6, jv.value.data(),
                 jv.dt.data(), jv.dx1.data(), jv.dx2.data(), jv.dx3.data());
        const std::array<double, 8> eq = vacuum_equations(jv, f.bg.coeffs.nu);
        for (int i = 0; i < 3; ++i) {
          A.sup[4] = std::max(A.sup[4], std::abs(eq[std::size_t(i)]));
          A.ss[4] += eq[std::size_t(i)] * eq[std::size_t(i)];
          A.sup[5] = std::max(A.sup[5], std::abs(eq[std::size_t(i) + 3]));
          A.ss[5] += eq[std::size_t(i) + 3] * eq[std::size_t(i) + 3];
        }
        A.sup[6] = std::max(A.sup[6], std::abs(eq[6]));
        A.ss[6] += eq[6] * eq[6];
        A.sup[7] = std::max(A.sup[7], std::abs(eq[7]));
        A.ss[7] += eq[7] * eq[7];
        ++A.inc_v;
      }
    }
  });

  InteriorAcc total;
  for (const InteriorAcc& A : acc) {  // fixed chunk order => deterministic sums
    for (int g = 0; g < 8; ++g) {
      total.sup[std::size_t(g)] = std::max(total.sup[std::size_t(g)], A.sup[std::size_t(g)]);
      total.ss[std::size_t(g)] += A.ss[std::size_t(g)];
    }
    total.inc_p += A.inc_p;
    total.exc_p += A.exc_p;
    total.inc_v += A.inc_v;
    total.exc_v += A.exc_v;
  }
  InteriorReport rep;
  for (int g = 0; g < 4; ++g) {
    rep.plasma[std::size_t(g)].sup = total.sup[std::size_t(g)];
    rep.plasma[std::size_t(g)].l2 =
        std::sqrt(total.ss[std::size_t(g)] / double(std::max(1L, total.inc_p)));
    rep.vacuum[std::size_t(g)].sup = total.sup[std::size_t(g) + 4];
    rep.vacuum[std::size_t(g)].l2 =
        std::sqrt(total.ss[std::size_t(g) + 4] / double(std::max(1L, total.inc_v)));
  }
  rep.included_points = total.inc_p + total.inc_v;
  rep.excluded_points = total.exc_p + total.exc_v;
  return rep;
}

JumpReport jump_residual(const WkbField& f) {
  const NodeTables tabs = build_tables(f);
  const EigenData ed = eigen_data(f.bg);
  const std::size_t nn = std::size_t(f.grid.nx1) * std::size_t(f.grid.nx2);
  const double nu = f.bg.coeffs.nu;
  const std::size_t nchunks = parallel_chunk_count(nn);
  std::vector<JumpAcc> acc(nchunks);

  parallel_for_chunks(nn, [&](std::size_t chunk, std::size_t ab, std::size_t ae) {
    JumpAcc& A = acc[chunk];
    double pv[7], pd[7], p1[7], p2[7], p3[7];
    double vv[6], vd[6], v1[6], v2[6], v3[6];
    for (std::size_t a = ab; a < ae; ++a) {
      const double x1 = 2.0 * M_PI * double(a / std::size_t(f.grid.nx2)) / f.grid.nx1;
      const double x2 = 2.0 * M_PI * double(a % std::size_t(f.grid.nx2)) / f.grid.nx2;
      const HarmonicSlice h = tabs.slice(a);
      const FrontPoint fp = front_point(f, h, f.time, x1, x2);
      // both traces evaluated exactly on the interface x3 = phi_app
      side_jet(f, h, fp, fp.phi_app, true, ed.Rp.data(), ed.base_p.data(), 7, pv, pd, p1, p2,
               p3);
      side_jet(f, h, fp, fp.phi_app, false, ed.Rm.data(), ed.base_v.data(), 6, vv, vd, v1, v2,
               v3);
      const double* u = pv;
      const double* B = pv + 3;
      const double q = pv[6];
      const double* H = vv;
      const double* E = vv + 3;
      const double d1 = fp.d1phi, d2 = fp.d2phi;
      const double r1 = fp.dtphi + u[0] * d1 + u[1] * d2 - u[2];
      const double r2 = q - 0.5 * (H[0] * H[0] + H[1] * H[1] + H[2] * H[2]) +
                        0.5 * (E[0] * E[0] + E[1] * E[1] + E[2] * E[2]);
      const double r3 = -B[0] * d1 - B[1] * d2 + B[2];
      const double r4 = -H[0] * d1 - H[1] * d2 + H[2];
      const double u_dot_N = -u[0] * d1 - u[1] * d2 + u[2];
      const double r5a = -d2 * E[2] - E[1] - nu * u_dot_N * H[0];
      const double r5b = E[0] + d1 * E[2] - nu * u_dot_N * H[1];
      const double r5c = -d1 * E[1] + d2 * E[0] - nu * u_dot_N * H[2];
      const double cons = r5c - (d1 * r5a + d2 * r5b - nu * u_dot_N * r4);
      const double rr[5] = {r1, r2, r3, r4, std::max({std::abs(r5a), std::abs(r5b), std::abs(r5c)})};
      for (int c = 0; c < 4; ++c) {
        A.sup[std::size_t(c)] = std::max(A.sup[std::size_t(c)], std::abs(rr[c]));
        A.ss[std::size_t(c)] += rr[c] * rr[c];
      }
      A.sup[4] = std::max(A.sup[4], rr[4]);
      A.ss[4] += r5a * r5a + r5b * r5b + r5c * r5c;
      A.sup[5] = std::max(A.sup[5], std::abs(cons));
    }
  });

  JumpAcc total;
  for (const JumpAcc& A : acc) {
    for (int c = 0; c < 6; ++c)
      total.sup[std::size_t(c)] = std::max(total.sup[std::size_t(c)], A.sup[std::size_t(c)]);
    for (int c = 0; c < 5; ++c) total.ss[std::size_t(c)] += A.ss[std::size_t(c)];
  }
  JumpReport rep;
  for (int c = 0; c < 5; ++c) {
    rep.conditions[std::size_t(c)].sup = total.sup[std::size_t(c)];
    rep.conditions[std::size_t(c)].l2 = std::sqrt(total.ss[std::size_t(c)] / double(nn));
  }
  rep.third_row_consistency = total.sup[5];
  return rep;
}

namespace {

// least-squares slope of log(y) against log(x)
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / den;
}

}  // namespace

SweepReport epsilon_sweep(const Background& bg, const FrontSpectrum& front,
                          const FrontSpectrum& front_dot, const std::vector<int>& l_values,
                          const WkbGrid& grid) {
  if (l_values.size() < 2)
    throw std::invalid_argument("epsilon_sweep: need at least two values of l");
  SweepReport rep;
  rep.degenerate = hs_norm(front, 0.0) == 0.0;
  std::vector<double> int_sup, bnd_sup;
  for (int l : l_values) {
    Background bgl = bg;
    bgl.freq = make_frequency(bg.freq.p, bg.freq.q, l, bg.freq.tau);
    const WkbField f = assemble_wkb(bgl, front, front_dot, grid);
    rep.eps.push_back(bgl.freq.eps);
    rep.interior.push_back(interior_residual(f));
    rep.boundary.push_back(jump_residual(f));
    double mi = 0.0, mb = 0.0;
    for (int g = 0; g < 4; ++g) {
      mi = std::max(mi, rep.interior.back().plasma[std::size_t(g)].sup);
      mi = std::max(mi, rep.interior.back().vacuum[std::size_t(g)].sup);
    }
    for (int c = 0; c < 5; ++c)
      mb = std::max(mb, rep.boundary.back().conditions[std::size_t(c)].sup);
    int_sup.push_back(mi);
    bnd_sup.push_back(mb);
  }
  if (rep.degenerate) {
    rep.interior_slope = std::numeric_limits<double>::quiet_NaN();
    rep.boundary_slope = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  for (double v : int_sup)
    if (v < 1e-12) rep.fp_floor_warning = true;
  for (double v : bnd_sup)
    if (v < 1e-12) rep.fp_floor_warning = true;
  rep.interior_slope = loglog_slope(rep.eps, int_sup);
  rep.boundary_slope = loglog_slope(rep.eps, bnd_sup);
  return rep;
}

std::array<double, 3> rectification_coefficients(const ReferenceState& state, const Vec2& xi,
                                                 double tau) {
  const double H1 = state.H0[0], H2 = state.H0[1], E3 = state.E3_0;
  const double nu = state.nu;
  const double x1 = xi[0], x2 = xi[1];
  const double b_minus = x1 * H1 + x2 * H2;
  const double ntau = nu * tau;
  std::array<double, 3> c{};
  c[0] = (x2 * H1 - x1 * H2 + ntau * E3) * b_minus * nu * nu;
  c[1] = (-ntau * x2 * H1 * H1 + ntau * x1 * H1 * H2 - (ntau * ntau + x2 * x2) * H1 * E3 +
          x1 * x2 * H2 * E3 - x2 * E3 * E3) *
         nu;
  c[2] = (-ntau * x2 * H1 * H2 + ntau * x1 * H2 * H2 + x1 * x2 * H1 * E3 -
          (ntau * ntau + x1 * x1) * H2 * E3 + x1 * E3 * E3) *
         nu;
  return c;
}

RectificationReport rectification_indicator(const std::vector<FrontSpectrum>& snapshots,
                                            const Background& bg) {
  if (snapshots.size() < 3)
    throw std::invalid_argument("rectification_indicator: need >= 3 snapshots");
  const int J = snapshots.front().J, K = snapshots.front().K;
  for (const FrontSpectrum& s : snapshots)
    if (s.J != J || s.K != K)
      throw std::invalid_argument("rectification_indicator: snapshot truncations differ");
  const double dt0 = snapshots[1].time - snapshots[0].time;
  if (dt0 <= 0.0)
    throw std::invalid_argument("rectification_indicator: snapshot times must increase");
  for (std::size_t i = 1; i + 1 < snapshots.size(); ++i) {
    const double dti = snapshots[i + 1].time - snapshots[i].time;
    if (std::abs(dti - dt0) > 1e-9 * std::max(1.0, std::abs(dt0)))
      throw std::invalid_argument("rectification_indicator: snapshots not equally spaced");
  }

  const int N = std::max(4, int(fft::next_pow2(std::size_t(4 * J + 1))));
  const std::size_t nn = std::size_t(N) * std::size_t(N);
  // S(t, y') = 2 sum_{k>=1} k |phi~(t, y', k)|^2 sampled on the N x N grid
  std::vector<std::vector<double>> S(snapshots.size(), std::vector<double>(nn, 0.0));
  for (std::size_t s = 0; s < snapshots.size(); ++s) {
    const std::vector<cplx> tab = front_node_harmonics(snapshots[s], N);
    parallel_for(nn, [&](std::size_t ab, std::size_t ae) {
      for (std::size_t a = ab; a < ae; ++a) {
        double acc = 0.0;
        const cplx* row = tab.data() + a * std::size_t(2 * K + 1);
        for (int k = 1; k <= K; ++k) {
          const cplx v = row[std::size_t(k + K)];
          acc += double(k) * std::norm(v);
        }
        S[s][a] = 2.0 * acc;
      }
    });
  }

  const std::array<double, 3> C =
      rectification_coefficients(bg.state, bg.freq.xi, bg.freq.tau);
  RectificationReport rep;
  rep.coeffs = C;
  rep.n_grid = N;
  double sup_tt = 0.0, sup_t1 = 0.0, sup_t2 = 0.0;
  for (std::size_t s = 1; s + 1 < snapshots.size(); ++s) {
    rep.times.push_back(snapshots[s].time);
    std::vector<double> dtt(nn), dts(nn);
    for (std::size_t a = 0; a < nn; ++a) {
      dtt[a] = (S[s + 1][a] - 2.0 * S[s][a] + S[s - 1][a]) / (dt0 * dt0);
      dts[a] = (S[s + 1][a] - S[s - 1][a]) / (2.0 * dt0);
    }
    // spectral y'-derivatives of dt S (band-limited to 2J < N/2, so exact)
    std::vector<cplx> buf(nn);
    for (std::size_t a = 0; a < nn; ++a) buf[a] = cplx(dts[a], 0.0);
    fft::forward_2d(buf.data(), N, N);
    std::vector<cplx> g1(nn), g2(nn);
    for (int a1 = 0; a1 < N; ++a1) {
      int j1 = a1 <= N / 2 ? a1 : a1 - N;
      if (a1 == N / 2) j1 = 0;  // Nyquist content is zero; keep derivative odd
      for (int a2 = 0; a2 < N; ++a2) {
        int j2 = a2 <= N / 2 ? a2 : a2 - N;
        if (a2 == N / 2) j2 = 0;
        const std::size_t a = std::size_t(a1) * std::size_t(N) + std::size_t(a2);
        g1[a] = buf[a] * cplx(0.0, double(j1)) / double(nn);
        g2[a] = buf[a] * cplx(0.0, double(j2)) / double(nn);
      }
    }
    fft::backward_2d(g1.data(), N, N);
    fft::backward_2d(g2.data(), N, N);
    std::vector<double> ind(nn);
    for (std::size_t a = 0; a < nn; ++a) {
      const double d1 = g1[a].real(), d2 = g2[a].real();
      ind[a] = C[0] * dtt[a] + C[1] * d1 + C[2] * d2;
      rep.sup = std::max(rep.sup, std::abs(ind[a]));
      sup_tt = std::max(sup_tt, std::abs(dtt[a]));
      sup_t1 = std::max(sup_t1, std::abs(d1));
      sup_t2 = std::max(sup_t2, std::abs(d2));
    }
    rep.indicator.push_back(std::move(ind));
  }
  rep.derivative_scale = sup_tt + sup_t1 + sup_t2;
  return rep;
}

}  // namespace pvsurf
