#include "pvsurf/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace pvsurf::fft {

namespace {

std::mutex plan_mutex;

fftw_plan plan_for(std::size_t n0, std::size_t n1, int sign) {
  // cached per (shape, sign); n1 == 0 marks a 1-d transform
  static std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(plan_mutex);
  const auto key = std::make_tuple(n0, n1, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const std::size_t total = n1 == 0 ? n0 : n0 * n1;
  fftw_complex* buf = fftw_alloc_complex(total);
  fftw_plan p = n1 == 0
                    ? fftw_plan_dft_1d(int(n0), buf, buf, sign, FFTW_ESTIMATE)
                    : fftw_plan_dft_2d(int(n0), int(n1), buf, buf, sign, FFTW_ESTIMATE);
  fftw_free(buf);
  cache.emplace(key, p);
  return p;
}

void run(std::complex<double>* data, std::size_t n0, std::size_t n1, int sign) {
  fftw_plan p = plan_for(n0, n1, sign);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data),
                   reinterpret_cast<fftw_complex*>(data));
}

}  // namespace

void forward_1d(std::complex<double>* data, std::size_t n) { run(data, n, 0, FFTW_FORWARD); }
void backward_1d(std::complex<double>* data, std::size_t n) { run(data, n, 0, FFTW_BACKWARD); }
void forward_2d(std::complex<double>* data, std::size_t n0, std::size_t n1) {
  run(data, n0, n1, FFTW_FORWARD);
}
void backward_2d(std::complex<double>* data, std::size_t n0, std::size_t n1) {
  run(data, n0, n1, FFTW_BACKWARD);
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace pvsurf::fft
