#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace sar {

// Thin FFTW wrapper. Plans are cached per (length, direction) and created
// under a lock (the FFTW planner is not thread-safe); execution uses the
// new-array interface and may run concurrently on distinct buffers. Plans are
// created with FFTW_ESTIMATE | FFTW_UNALIGNED so results do not depend on
// runtime measurement or buffer alignment.
namespace fftdetail {

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <typename Real>
struct Traits;

template <>
struct Traits<double> {
  using plan_type = fftw_plan;
  using complex_type = fftw_complex;
  static plan_type make_plan(int n, complex_type* buf, int sign) {
    return fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  static void execute(plan_type p, complex_type* in, complex_type* out) {
    fftw_execute_dft(p, in, out);
  }
};

template <>
struct Traits<float> {
  using plan_type = fftwf_plan;
  using complex_type = fftwf_complex;
  static plan_type make_plan(int n, complex_type* buf, int sign) {
    return fftwf_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  static void execute(plan_type p, complex_type* in, complex_type* out) {
    fftwf_execute_dft(p, in, out);
  }
};

template <typename Real>
typename Traits<Real>::plan_type plan_for(int n, int sign) {
  using T = Traits<Real>;
  static std::map<std::pair<int, int>, typename T::plan_type> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto key = std::make_pair(n, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<std::complex<Real>> scratch(n);
  auto plan = T::make_plan(
      n, reinterpret_cast<typename T::complex_type*>(scratch.data()), sign);
  cache.emplace(key, plan);
  return plan;
}

} // namespace fftdetail

// In-place forward DFT, unnormalized.
template <typename Real>
void fft_inplace(std::complex<Real>* data, std::size_t n) {
  using T = fftdetail::Traits<Real>;
  auto plan = fftdetail::plan_for<Real>(static_cast<int>(n), FFTW_FORWARD);
  auto* buf = reinterpret_cast<typename T::complex_type*>(data);
  T::execute(plan, buf, buf);
}

// In-place inverse DFT, scaled by 1/n.
template <typename Real>
void ifft_inplace(std::complex<Real>* data, std::size_t n) {
  using T = fftdetail::Traits<Real>;
  auto plan = fftdetail::plan_for<Real>(static_cast<int>(n), FFTW_BACKWARD);
  auto* buf = reinterpret_cast<typename T::complex_type*>(data);
  T::execute(plan, buf, buf);
  Real scale = Real(1) / static_cast<Real>(n);
  for (std::size_t i = 0; i < n; ++i) data[i] *= scale;
}

template <typename Real>
void fft_inplace(std::vector<std::complex<Real>>& v) {
  fft_inplace(v.data(), v.size());
}

template <typename Real>
void ifft_inplace(std::vector<std::complex<Real>>& v) {
  ifft_inplace(v.data(), v.size());
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// DFT bin frequency for sample rate fs, wrapped to (-fs/2, fs/2].
inline double fft_bin_frequency(std::size_t index, std::size_t n, double fs) {
  double f = static_cast<double>(index) * fs / static_cast<double>(n);
  if (index > n / 2) f -= fs;
  return f;
}

} // namespace sar
