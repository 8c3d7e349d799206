#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

#include "sar/constants.hpp"

namespace sar {

// Counter-based generator: every (seed, stream, counter) triple maps to an
// independent value, so pulses can be filled in parallel while staying
// bit-identical to sequential evaluation. SplitMix64 finalizer.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t counter_hash(uint64_t seed, uint64_t stream, uint64_t counter) {
  uint64_t h = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
  h = splitmix64(h ^ stream);
  return splitmix64(h ^ counter);
}

inline double uniform_from_bits(uint64_t bits) {
  // (0, 1]: never returns 0, so log() below is safe.
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

// One complex Gaussian sample with E|z|^2 = 1, via Box-Muller. The standard
// library distributions are not bit-portable, and reproducibility here is
// contractual.
inline std::complex<double> complex_gaussian(uint64_t seed, uint64_t stream,
                                             uint64_t counter) {
  double u1 = uniform_from_bits(counter_hash(seed, stream, 2 * counter));
  double u2 = uniform_from_bits(counter_hash(seed, stream, 2 * counter + 1));
  double r = std::sqrt(-std::log(u1)); // variance 1/2 per quadrature
  double phi = 2.0 * kPi * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

inline double uniform_double(uint64_t seed, uint64_t stream, uint64_t counter) {
  return uniform_from_bits(counter_hash(seed, stream, counter));
}

} // namespace sar
