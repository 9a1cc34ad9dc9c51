#pragma once

#include <complex>
#include <cstddef>

namespace pvsurf::fft {

// Unnormalized in-place complex DFTs backed by cached FFTW plans
// (FFTW_ESTIMATE only, so plans are reproducible). Sign convention:
// forward applies e^{-i j x}, backward e^{+i j x}. Thread-safe execution.
void forward_1d(std::complex<double>* data, std::size_t n);
void backward_1d(std::complex<double>* data, std::size_t n);
void forward_2d(std::complex<double>* data, std::size_t n0, std::size_t n1);
void backward_2d(std::complex<double>* data, std::size_t n0, std::size_t n1);

std::size_t next_pow2(std::size_t n);

}  // namespace pvsurf::fft
