#pragma once

#include <cmath>
#include <complex>
#include <mutex>
#include <span>
#include <vector>

#include "sar/constants.hpp"
#include "sar/error.hpp"
#include "sar/fft.hpp"

namespace sar {

struct ChirpParams {
  double carrier_frequency = 9.65e9; // Hz
  double bandwidth = 300e6;          // Hz
  double pulse_duration = 5e-6;      // s
  double sample_rate = 360e6;        // Hz, defaults to 1.2x bandwidth
  int chirp_sign = +1;

  double wavelength() const { return kSpeedOfLight / carrier_frequency; }
  double chirp_rate() const { return chirp_sign * bandwidth / pulse_duration; }
  int sample_count() const {
    return static_cast<int>(std::lround(pulse_duration * sample_rate));
  }

  void validate() const {
    if (!(carrier_frequency > 0.0))
      throw Error(ErrorCode::kInvalidParams, "carrier frequency must be positive");
    if (bandwidth < 40e6 || bandwidth > 300e6)
      throw Error(ErrorCode::kInvalidParams, "range bandwidth must be in [40, 300] MHz");
    if (!(pulse_duration > 0.0))
      throw Error(ErrorCode::kInvalidParams, "pulse duration must be positive");
    if (sample_rate < 1.1 * bandwidth)
      throw Error(ErrorCode::kInvalidParams, "sample rate must be at least 1.1x bandwidth");
    if (chirp_sign != 1 && chirp_sign != -1)
      throw Error(ErrorCode::kInvalidParams, "chirp sign must be +/-1");
  }
};

enum class WindowFamily { kUniform, kRaisedCosine };

// Single-parameter raised cosine over a processed band: a0 + (1-a0) cos(pi x)
// with x the band-normalized frequency in [-1, 1]. a0 = 1 is uniform.
struct WindowSpec {
  WindowFamily family = WindowFamily::kUniform;
  double coefficient = 1.0;
  double target_pslr_db = -13.26;

  double value(double x) const {
    if (family == WindowFamily::kUniform) return 1.0;
    if (x > 1.0) x = 1.0;
    if (x < -1.0) x = -1.0;
    return coefficient + (1.0 - coefficient) * std::cos(kPi * x);
  }

  void validate(bool for_grd = false) const {
    if (coefficient < 0.5 || coefficient > 1.0)
      throw Error(ErrorCode::kInvalidParams, "window coefficient must be in [0.5, 1]");
    if (family == WindowFamily::kUniform && coefficient != 1.0)
      throw Error(ErrorCode::kInvalidParams, "uniform window requires coefficient 1");
    if (for_grd && target_pslr_db > -17.0)
      throw Error(ErrorCode::kInvalidParams,
                  "detected products require target PSLR of -17 dB or better");
  }
};

// Baseband linear-FM pulse, unit amplitude, time centered on the pulse.
// bandwidth == 0 is accepted as the degenerate constant-phase limit.
inline std::vector<std::complex<double>> generate_chirp(const ChirpParams& p) {
  if (p.bandwidth != 0.0) {
    p.validate();
  } else if (!(p.pulse_duration > 0.0) || !(p.sample_rate > 0.0)) {
    throw Error(ErrorCode::kInvalidParams, "invalid degenerate chirp");
  }
  int n = p.sample_count();
  if (n <= 0) throw Error(ErrorCode::kInvalidParams, "chirp has no samples");
  std::vector<std::complex<double>> out(n);
  double rate = p.chirp_rate();
  double dt = 1.0 / p.sample_rate;
  double center = 0.5 * (n - 1);
  for (int i = 0; i < n; ++i) {
    double t = (i - center) * dt;
    double phase = kPi * rate * t * t;
    out[i] = {std::cos(phase), std::sin(phase)};
  }
  return out;
}

namespace sigdetail {

// Impulse response of a frequency-domain window over a unit band:
// magnitude samples at 1/(band * oversample) spacing, peak at index 0.
inline std::vector<double> window_impulse_response(const WindowSpec& w,
                                                   int band_bins = 2048,
                                                   int oversample = 64) {
  std::size_t n = static_cast<std::size_t>(band_bins) * oversample;
  std::vector<std::complex<double>> spec(n, 0.0);
  for (int k = 0; k < band_bins; ++k) {
    // Band bin center frequencies, symmetric about zero.
    double x = (k + 0.5) / (band_bins / 2.0) - 1.0;
    double v = w.value(x);
    // Positive half goes to the front bins, negative half wraps.
    long idx = k - band_bins / 2;
    std::size_t bin = idx >= 0 ? idx : n + idx;
    spec[bin] = v;
  }
  ifft_inplace(spec);
  std::vector<double> mag(n);
  for (std::size_t i = 0; i < n; ++i) mag[i] = std::abs(spec[i]);
  return mag;
}

// -3 dB full width of the window impulse response in units of 1/band.
inline double window_half_power_width(const WindowSpec& w) {
  const int oversample = 64;
  auto mag = window_impulse_response(w, 2048, oversample);
  double peak = mag[0];
  double threshold = peak / std::sqrt(2.0);
  std::size_t i = 1;
  while (i < mag.size() / 2 && mag[i] > threshold) ++i;
  double frac = (mag[i - 1] - threshold) / (mag[i - 1] - mag[i]);
  double half = (static_cast<double>(i - 1) + frac) / oversample;
  return 2.0 * half;
}

// First-sidelobe level of the window impulse response, dB below the peak.
inline double window_first_sidelobe_db(const WindowSpec& w) {
  const int oversample = 64;
  auto mag = window_impulse_response(w, 2048, oversample);
  double peak = mag[0];
  std::size_t i = 1;
  while (i + 1 < mag.size() / 2 && mag[i + 1] < mag[i]) ++i; // descend to null
  double sidelobe = 0.0;
  std::size_t end = std::min(mag.size() / 2, i + 8 * std::size_t(oversample));
  for (std::size_t k = i; k < end; ++k) sidelobe = std::max(sidelobe, mag[k]);
  return amplitude_db(sidelobe / peak);
}

} // namespace sigdetail

// Mainlobe broadening of a window relative to the uniform response.
inline double window_broadening_factor(const WindowSpec& w) {
  if (w.family == WindowFamily::kUniform) return 1.0;
  static std::mutex mutex;
  static std::vector<std::pair<double, double>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  for (const auto& [coeff, factor] : cache)
    if (coeff == w.coefficient) return factor;
  WindowSpec uniform;
  double factor = sigdetail::window_half_power_width(w) /
                  sigdetail::window_half_power_width(uniform);
  cache.emplace_back(w.coefficient, factor);
  return factor;
}

// Raised-cosine coefficient tuned until the first sidelobe meets the target,
// giving margin on the -17 dB detected-product requirement.
inline WindowSpec tuned_sidelobe_window(double first_sidelobe_db = -17.5) {
  static std::mutex mutex;
  static std::vector<std::pair<double, WindowSpec>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  for (const auto& [target, spec] : cache)
    if (target == first_sidelobe_db) return spec;

  double lo = 0.67, hi = 1.0; // sidelobe grows monotonically with a0 here
  for (int i = 0; i < 48; ++i) {
    double mid = 0.5 * (lo + hi);
    WindowSpec w{WindowFamily::kRaisedCosine, mid, first_sidelobe_db};
    if (sigdetail::window_first_sidelobe_db(w) > first_sidelobe_db)
      hi = mid;
    else
      lo = mid;
  }
  WindowSpec result{WindowFamily::kRaisedCosine, lo, first_sidelobe_db};
  cache.emplace_back(first_sidelobe_db, result);
  return result;
}

// Frequency-domain correlation against the conjugate chirp replica. The
// output keeps the input time axis; an echo whose pulse center sits at delay
// tau peaks at that delay. Gain is normalized so a full-amplitude replica
// compresses to a unit peak.
inline std::vector<std::complex<double>> matched_filter(
    std::span<const std::complex<double>> signal, const ChirpParams& p,
    const WindowSpec& window = {}) {
  p.validate();
  window.validate();
  auto replica = generate_chirp(p);
  if (signal.size() < replica.size())
    throw Error(ErrorCode::kLengthMismatch,
                "signal shorter than the chirp replica");

  std::size_t n = next_pow2(signal.size() + replica.size());
  std::vector<std::complex<double>> x(n, 0.0);
  std::copy(signal.begin(), signal.end(), x.begin());
  std::vector<std::complex<double>> r(n, 0.0);
  std::copy(replica.begin(), replica.end(), r.begin());
  fft_inplace(x);
  fft_inplace(r);

  double energy = 0.0;
  for (const auto& v : replica) energy += std::norm(v);
  double center = 0.5 * (replica.size() - 1);
  double half_band = 0.5 * p.bandwidth;
  for (std::size_t k = 0; k < n; ++k) {
    double f = fft_bin_frequency(k, n, p.sample_rate);
    double w = std::abs(f) <= half_band ? window.value(f / half_band) : 1.0;
    // Delay by the replica half length so the peak lands on the pulse center.
    // Signed bin index: the half-sample part of the shift must not jump at
    // the Nyquist fold.
    double kk = (k <= n / 2) ? static_cast<double>(k)
                             : static_cast<double>(k) - static_cast<double>(n);
    double shift = -2.0 * kPi * kk * center / n;
    std::complex<double> rot{std::cos(shift), std::sin(shift)};
    x[k] *= std::conj(r[k]) * w * rot / energy;
  }
  ifft_inplace(x);
  x.resize(signal.size());
  return x;
}

// Slant-range resolution bookkeeping. kappa(UNIFORM) is pinned so that a
// 300 MHz collection reports 0.50 m; window broadening scales it.
inline double slant_resolution(double bandwidth, const WindowSpec& window = {}) {
  if (!(bandwidth > 0.0))
    throw Error(ErrorCode::kInvalidParams, "bandwidth must be positive");
  constexpr double kKappaUniform = 2.0 * 300e6 * 0.5 / kSpeedOfLight;
  double kappa = kKappaUniform * window_broadening_factor(window);
  return kappa * kSpeedOfLight / (2.0 * bandwidth);
}

inline double ground_resolution(double slant_res, double incidence_deg) {
  if (incidence_deg <= 0.0 || incidence_deg >= 90.0)
    throw Error(ErrorCode::kDegenerateIncidence,
                "incidence must be in (0, 90) degrees");
  return slant_res / std::sin(incidence_deg * kDegToRad);
}

} // namespace sar
