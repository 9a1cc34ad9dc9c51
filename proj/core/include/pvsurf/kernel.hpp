#pragma once

#include <complex>
#include <vector>

namespace pvsurf {

enum class KernelMode { direct, exp_integral };

// Hamilton kernel, closed form 2|k1+k2||k1||k2| / (|k1+k2| + |k1| + |k2|).
// Requires k1, k2, k1+k2 all nonzero (std::domain_error otherwise).
double kernel_lambda(long k1, long k2);

// Same kernel through the sign-pattern case table (k1,k2 > 0 -> k1 k2;
// k1+k2 > 0, k2 < 0 -> -k1 k2 - k2^2; extended by symmetry and reality).
double kernel_lambda_piecewise(long k1, long k2);

// Quadratic interaction sums
//   Q(k) = sum_{k1+k2=k, k1,k2 != 0, |k1|,|k2| <= K}
//          |k| |k1| |k2| / (|k| + |k1| + |k2|) * a(k1) b(k2)
// over spectra indexed k = -K..K (array index k + K). Terms with |k1| or
// |k2| > K are dropped; no padding. No dealiasing is applied here.
//
// direct: per-k summation, O(K) per output.
// exp_integral: 1/(|k|+|k1|+|k2|) = int_0^inf e^{-s(|k|+|k1|+|k2|)} ds
//   evaluated by scaled Gauss-Laguerre rules (default 96 nodes), which
//   factor the weight and turn the sums into ordinary convolutions; the
//   k1-range is banded by max(|k1|,|k2|) so every band's exponents stay in
//   the rule's accurate window.
struct KernelPlan {
  int K = 0;
  KernelMode mode = KernelMode::direct;
  int nodes = 96;
};

// All outputs k = -2K..2K (index k + 2K), k = 0 slot zero.
std::vector<std::complex<double>> quadratic_cross_all(
    const std::vector<std::complex<double>>& a, const std::vector<std::complex<double>>& b,
    const KernelPlan& plan);

inline std::vector<std::complex<double>> quadratic_sum_all(
    const std::vector<std::complex<double>>& phi, const KernelPlan& plan) {
  return quadratic_cross_all(phi, phi, plan);
}

// Single-output form of the sum above; requires k != 0 and |k| <= 2K.
std::complex<double> quadratic_sum(const std::vector<std::complex<double>>& phi, int k,
                                   const KernelPlan& plan);

}  // namespace pvsurf
