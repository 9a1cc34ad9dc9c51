#include "pvsurf/kernel.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "pvsurf/fft.hpp"

namespace pvsurf {

double kernel_lambda(long k1, long k2) {
  const long k = k1 + k2;
  if (k1 == 0 || k2 == 0 || k == 0) {
    throw std::domain_error("kernel requires k1, k2, k1+k2 nonzero");
  }
  const double a = std::abs(double(k)), a1 = std::abs(double(k1)), a2 = std::abs(double(k2));
  return 2.0 * a * a1 * a2 / (a + a1 + a2);
}

double kernel_lambda_piecewise(long k1, long k2) {
  if (k1 == 0 || k2 == 0 || k1 + k2 == 0) {
    throw std::domain_error("kernel requires k1, k2, k1+k2 nonzero");
  }
  if (k1 + k2 < 0) return kernel_lambda_piecewise(-k1, -k2);  // reality
  if (k1 > 0 && k2 > 0) return double(k1) * double(k2);
  if (k2 < 0) return -double(k1) * double(k2) - double(k2) * double(k2);
  return kernel_lambda_piecewise(k2, k1);  // symmetry
}

namespace {

using C = std::complex<double>;

struct GaussLaguerre {
  std::vector<double> x;  // nodes
  std::vector<double> w;  // weights scaled by e^{x_i} (stay O(1)-representable)
};

// Laguerre polynomials premultiplied by e^{-x/2}: the scaled values stay
// representable where L_n itself and the bare weight would over/underflow.
// Returns p_n = L_n(x) e^{-x/2} and p_{n-1}; long double keeps the seed
// expl(-x/2) normal for every node a practical rule can produce.
std::pair<double, double> laguerre_scaled(int n, double x) {
  long double p0 = std::exp((long double)(-0.5) * x);
  long double p1 = (1.0L - x) * p0;
  if (n == 0) return {double(p0), 0.0};
  for (int k = 1; k < n; ++k) {
    const long double p2 = ((2.0L * k + 1.0L - x) * p1 - (long double)(k)*p0) / (k + 1.0L);
    p0 = p1;
    p1 = p2;
  }
  return {double(p1), double(p0)};
}

// Nodes seeded by Golub-Welsch on the Laguerre Jacobi matrix (diag 2i+1,
// offdiag i), then Newton-polished on L_n; weights from the classical
// x / ((n+1) L_{n+1}(x))^2 formula evaluated in scaled form.
const GaussLaguerre& gauss_laguerre(int n) {
  static std::mutex m;
  static std::map<int, GaussLaguerre> cache;
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    J(i, i) = 2.0 * i + 1.0;
    if (i > 0) J(i, i - 1) = J(i - 1, i) = double(i);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussLaguerre gl;
  gl.x.resize(n);
  gl.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = es.eigenvalues()(i);
    for (int it_newton = 0; it_newton < 3; ++it_newton) {
      const auto [pn, pnm1] = laguerre_scaled(n, x);
      const double deriv = n * (pn - pnm1) / x;  // = L_n'(x) e^{-x/2}
      if (deriv == 0.0) break;
      x -= pn / deriv;
    }
    const double pnp1 = laguerre_scaled(n + 1, x).first;
    gl.x[i] = x;
    gl.w[i] = x / ((n + 1.0) * (n + 1.0) * pnp1 * pnp1);
  }
  return cache.emplace(n, std::move(gl)).first->second;
}

// Bands over s = max(|k1|,|k2|), ratio 8, so each band's half-exponent
// p = (|k|+|k1|+|k2|)/2 stays within [max(2,lo), 2*hi]: inside the accurate
// window of a 96-node scaled rule.
struct Band {
  int lo, hi;
  double sigma;
};

std::vector<Band> bands_for(int K) {
  std::vector<Band> out;
  int lo = 1;
  while (lo <= K) {
    const int hi = std::min(K, 8 * lo - 1);
    const double plo = std::max(2, lo), phi = 2.0 * hi;
    out.push_back({lo, hi, std::sqrt(plo * phi) / 2.2});
    lo = hi + 1;
  }
  return out;
}

std::vector<C> cross_direct(const std::vector<C>& a, const std::vector<C>& b, int K) {
  std::vector<C> out(4 * K + 1, C(0.0));
  for (int k = -2 * K; k <= 2 * K; ++k) {
    if (k == 0) continue;
    C acc(0.0);
    const int lo = std::max(-K, k - K), hi = std::min(K, k + K);
    for (int k1 = lo; k1 <= hi; ++k1) {
      const int k2 = k - k1;
      if (k1 == 0 || k2 == 0) continue;
      const double ak = std::abs(double(k)), a1 = std::abs(double(k1)),
                   a2 = std::abs(double(k2));
      acc += (ak * a1 * a2 / (ak + a1 + a2)) * a[k1 + K] * b[k2 + K];
    }
    out[k + 2 * K] = acc;
  }
  return out;
}

std::vector<C> cross_exp_integral(const std::vector<C>& a, const std::vector<C>& b, int K,
                                  int nodes) {
  const auto& gl = gauss_laguerre(nodes);
  const auto bands = bands_for(K);
  const std::size_t M = fft::next_pow2(std::size_t(4 * K + 2));
  std::vector<C> out(4 * K + 1, C(0.0));
  std::vector<C> fa(M), fbLow(M), fbBand(M), faLow(M);
  for (const Band& band : bands) {
    for (int i = 0; i < nodes; ++i) {
      const double rate = gl.x[i] / (2.0 * band.sigma);
      const double coef = gl.w[i] / (2.0 * band.sigma);
      std::fill(fa.begin(), fa.end(), C(0.0));
      std::fill(fbLow.begin(), fbLow.end(), C(0.0));
      std::fill(fbBand.begin(), fbBand.end(), C(0.0));
      std::fill(faLow.begin(), faLow.end(), C(0.0));
      for (int k1 = -K; k1 <= K; ++k1) {
        if (k1 == 0) continue;
        const int s = std::abs(k1);
        const double f = s * std::exp(-rate * s);
        const std::size_t idx = std::size_t(k1 + K);
        if (s >= band.lo && s <= band.hi) {
          fa[idx] = f * a[idx];
          fbBand[idx] = f * b[idx];
        }
        if (s <= band.hi) fbLow[idx] = f * b[idx];
        if (s < band.lo) faLow[idx] = f * a[idx];
      }
      // pairs with max in this band, each counted once:
      //   conv(a_band, b_{<=hi}) + conv(a_{<lo}, b_band)
      fft::forward_1d(fa.data(), M);
      fft::forward_1d(fbLow.data(), M);
      fft::forward_1d(fbBand.data(), M);
      fft::forward_1d(faLow.data(), M);
      for (std::size_t j = 0; j < M; ++j) {
        fa[j] = fa[j] * fbLow[j] + faLow[j] * fbBand[j];
      }
      fft::backward_1d(fa.data(), M);
      const double inv = 1.0 / double(M);
      for (int k = -2 * K; k <= 2 * K; ++k) {
        if (k == 0) continue;
        const double ak = std::abs(double(k));
        out[k + 2 * K] += coef * ak * std::exp(-rate * ak) * inv * fa[std::size_t(k + 2 * K)];
      }
    }
  }
  return out;
}

}  // namespace

std::vector<C> quadratic_cross_all(const std::vector<C>& a, const std::vector<C>& b,
                                   const KernelPlan& plan) {
  const int K = plan.K;
  if (K < 1 || a.size() != std::size_t(2 * K + 1) || b.size() != std::size_t(2 * K + 1)) {
    throw std::invalid_argument("spectrum must have size 2K+1 with K >= 1");
  }
  if (plan.mode == KernelMode::direct) return cross_direct(a, b, K);
  if (plan.nodes < 1) throw std::invalid_argument("exp-integral mode needs >= 1 node");
  return cross_exp_integral(a, b, K, plan.nodes);
}

std::complex<double> quadratic_sum(const std::vector<C>& phi, int k, const KernelPlan& plan) {
  if (k == 0 || std::abs(k) > 2 * plan.K) {
    throw std::domain_error("quadratic_sum requires k != 0 and |k| <= 2K");
  }
  return quadratic_sum_all(phi, plan)[std::size_t(k + 2 * plan.K)];
}

}  // namespace pvsurf
