#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "sar/constants.hpp"
#include "sar/error.hpp"
#include "sar/fft.hpp"
#include "sar/geometry.hpp"
#include "sar/mat2d.hpp"
#include "sar/parallel.hpp"
#include "sar/rawsim.hpp"
#include "sar/signal.hpp"

namespace sar {

enum class FocusAlgorithm { kRangeDoppler, kBackprojection };

// The processor gates both axes with a uniform band of band_fraction times
// the nominal bandwidth (the sinc -3 dB factor by default), and flattens the
// azimuth spectrum against the two-way antenna pattern. An unweighted
// response then measures c/(2B) in slant range and v_g/B_dop in azimuth.
struct FocusConfig {
  FocusAlgorithm algorithm = FocusAlgorithm::kRangeDoppler;
  double processed_doppler_bandwidth = 2700.0; // Hz, nominal
  int rcmc_kernel_taps = 8;
  WindowSpec azimuth_window;
  WindowSpec range_window;
  double band_fraction = kSincHalfPowerWidth;
  bool flatten_azimuth_pattern = true;
  bool equalize_range_spectrum = true;
  double antenna_length = 3.2; // m, azimuth-resolution floor bookkeeping

  void validate(ImagingMode mode, double prf) const {
    if (rcmc_kernel_taps < 4 || rcmc_kernel_taps % 2 != 0)
      throw Error(ErrorCode::kInvalidParams, "RCMC taps must be even and >= 4");
    if (!(band_fraction > 0.5 && band_fraction <= 1.0))
      throw Error(ErrorCode::kInvalidParams, "band fraction must be in (0.5, 1]");
    if (!(processed_doppler_bandwidth > 0.0))
      throw Error(ErrorCode::kInvalidParams, "processed Doppler bandwidth must be positive");
    if (mode == ImagingMode::kStripmap) {
      if (processed_doppler_bandwidth < 2700.0 || processed_doppler_bandwidth > 3100.0)
        throw Error(ErrorCode::kInvalidParams,
                    "stripmap processed Doppler bandwidth must be in [2700, 3100] Hz");
      if (processed_doppler_bandwidth > 0.9 * prf)
        throw Error(ErrorCode::kDopplerOverflow,
                    "processed Doppler bandwidth exceeds 0.9 PRF");
    }
    azimuth_window.validate();
    range_window.validate();
  }
};

struct FocusedImage {
  Array2D<std::complex<float>> pixels; // azimuth x slant range
  double azimuth_time_start = 0.0;
  double azimuth_time_step = 0.0;  // s
  double slant_range_start = 0.0;  // m
  double slant_range_step = 0.0;   // m
  FocusConfig config;
  CollectionPlan plan;
  double effective_velocity = 0.0;
  double ground_velocity = 0.0;
  double doppler_rate_center = 0.0; // Hz/s at scene-center range
  double noise_power_gain = 1.0;    // raw noise variance -> pixel variance

  double azimuth_time(std::size_t row) const {
    return azimuth_time_start + row * azimuth_time_step;
  }
  double slant_range(std::size_t col) const {
    return slant_range_start + col * slant_range_step;
  }
};

namespace focusdetail {

inline std::size_t next_fast_fft(std::size_t n) {
  auto is_fast = [](std::size_t m) {
    for (std::size_t p : {2, 3, 5})
      while (m % p == 0) m /= p;
    return m == 1;
  };
  while (!is_fast(n)) ++n;
  return n;
}

// Range compression operator: gated (and optionally spectrally equalized)
// correlation with the chirp replica, output on the input time axis and
// normalized so an in-band unit reflector compresses to a unit peak.
class RangeCompressor {
 public:
  RangeCompressor(const CollectionPlan& plan, const WindowSpec& window,
                  double band_fraction, bool equalize) {
    auto replica = generate_chirp(plan.chirp);
    n_range_ = plan.range_samples;
    nfft_ = next_pow2(n_range_ + replica.size());
    response_.assign(nfft_, 0.0);

    std::vector<std::complex<double>> r(nfft_, 0.0);
    std::copy(replica.begin(), replica.end(), r.begin());
    fft_inplace(r);

    double peak_power = 0.0;
    for (const auto& v : r) peak_power = std::max(peak_power, std::norm(v));
    double floor = 1e-6 * peak_power;
    double energy = static_cast<double>(replica.size());
    double center = 0.5 * (replica.size() - 1);
    double half_band = 0.5 * band_fraction * plan.chirp.bandwidth;
    double fs = plan.chirp.sample_rate;

    // Coherent peak for exact normalization: all in-band bins add in phase
    // at the response maximum.
    double coherent = 0.0;
    for (std::size_t k = 0; k < nfft_; ++k) {
      double f = fft_bin_frequency(k, nfft_, fs);
      if (std::abs(f) > half_band) continue;
      double w = window.value(f / half_band);
      std::complex<double> h =
          equalize ? std::conj(r[k]) / std::max(std::norm(r[k]), floor)
                   : std::conj(r[k]) / energy;
      double kk = (k <= nfft_ / 2) ? static_cast<double>(k)
                                   : static_cast<double>(k) - static_cast<double>(nfft_);
      double shift = -2.0 * kPi * kk * center / nfft_;
      response_[k] = h * w * std::complex<double>(std::cos(shift), std::sin(shift));
      coherent += std::abs(response_[k] * r[k]);
    }
    coherent /= static_cast<double>(nfft_);
    for (auto& h : response_) h /= coherent;

    noise_power_gain_ = 0.0;
    for (const auto& h : response_) noise_power_gain_ += std::norm(h);
    noise_power_gain_ /= static_cast<double>(nfft_);
  }

  std::size_t nfft() const { return nfft_; }
  double noise_power_gain() const { return noise_power_gain_; }

  void compress_row(const std::complex<float>* in, std::complex<float>* out) const {
    std::vector<std::complex<double>> buf(nfft_, 0.0);
    for (std::size_t i = 0; i < n_range_; ++i) buf[i] = in[i];
    fft_inplace(buf);
    for (std::size_t k = 0; k < nfft_; ++k) buf[k] *= response_[k];
    ifft_inplace(buf);
    for (std::size_t i = 0; i < n_range_; ++i)
      out[i] = std::complex<float>(static_cast<float>(buf[i].real()),
                                   static_cast<float>(buf[i].imag()));
  }

  // Compressed row, spectrally oversampled by `os` (for back-projection
  // interpolation). Output length n_range * os on the same time origin.
  void compress_row_oversampled(const std::complex<float>* in, int os,
                                std::complex<float>* out) const {
    std::vector<std::complex<double>> buf(nfft_, 0.0);
    for (std::size_t i = 0; i < n_range_; ++i) buf[i] = in[i];
    fft_inplace(buf);
    for (std::size_t k = 0; k < nfft_; ++k) buf[k] *= response_[k];
    std::size_t big = nfft_ * os;
    std::vector<std::complex<double>> pad(big, 0.0);
    for (std::size_t k = 0; k < nfft_ / 2; ++k) pad[k] = buf[k];
    for (std::size_t k = nfft_ / 2; k < nfft_; ++k) pad[big - nfft_ + k] = buf[k];
    ifft_inplace(pad);
    double scale = static_cast<double>(os);
    for (std::size_t i = 0; i < n_range_ * static_cast<std::size_t>(os); ++i)
      out[i] = std::complex<float>(static_cast<float>(pad[i].real() * scale),
                                   static_cast<float>(pad[i].imag() * scale));
  }

 private:
  std::vector<std::complex<double>> response_;
  std::size_t nfft_ = 0;
  std::size_t n_range_ = 0;
  double noise_power_gain_ = 1.0;
};

// Kaiser-windowed sinc interpolation kernel bank for RCMC.
class InterpKernel {
 public:
  InterpKernel(int taps, double kaiser_beta = 4.0, int fractions = 128)
      : taps_(taps), fractions_(fractions), weights_(taps * fractions) {
    auto bessel_i0 = [](double x) {
      double sum = 1.0, term = 1.0;
      for (int k = 1; k < 32; ++k) {
        term *= (x / (2.0 * k)) * (x / (2.0 * k));
        sum += term;
      }
      return sum;
    };
    double denom = bessel_i0(kaiser_beta);
    mean_energy_ = 0.0;
    for (int fi = 0; fi < fractions; ++fi) {
      double mu = static_cast<double>(fi) / fractions;
      double sum = 0.0;
      for (int t = 0; t < taps; ++t) {
        double arg = t - taps / 2 + 1 - mu;
        double x = arg / (taps / 2.0);
        double kaiser = (std::abs(x) <= 1.0)
                            ? bessel_i0(kaiser_beta * std::sqrt(1.0 - x * x)) / denom
                            : 0.0;
        double w = sinc(arg) * kaiser;
        weights_[fi * taps + t] = w;
        sum += w;
      }
      double e = 0.0;
      for (int t = 0; t < taps; ++t) {
        weights_[fi * taps + t] /= sum;
        e += weights_[fi * taps + t] * weights_[fi * taps + t];
      }
      mean_energy_ += e / fractions;
    }
  }

  int taps() const { return taps_; }
  double mean_energy() const { return mean_energy_; }

  // Interpolate row at fractional position pos (samples); zero outside.
  std::complex<double> sample(const std::complex<float>* row, std::size_t n,
                              double pos) const {
    double fl = std::floor(pos);
    int base = static_cast<int>(fl);
    double mu = pos - fl;
    int fi = std::min(fractions_ - 1, static_cast<int>(mu * fractions_));
    const double* w = &weights_[static_cast<std::size_t>(fi) * taps_];
    std::complex<double> acc = 0.0;
    for (int t = 0; t < taps_; ++t) {
      int idx = base - taps_ / 2 + 1 + t;
      if (idx < 0 || idx >= static_cast<int>(n)) continue;
      acc += w[t] * std::complex<double>(row[idx]);
    }
    return acc;
  }

 private:
  int taps_;
  int fractions_;
  std::vector<double> weights_;
  double mean_energy_ = 1.0;
};

inline void transpose(const Array2D<std::complex<float>>& in,
                      Array2D<std::complex<float>>& out) {
  const std::size_t block = 64;
  out = Array2D<std::complex<float>>(in.cols(), in.rows());
  par_for((in.rows() + block - 1) / block, [&](std::size_t rb) {
    std::size_t r0 = rb * block;
    std::size_t r1 = std::min(in.rows(), r0 + block);
    for (std::size_t c0 = 0; c0 < in.cols(); c0 += block) {
      std::size_t c1 = std::min(in.cols(), c0 + block);
      for (std::size_t r = r0; r < r1; ++r)
        for (std::size_t c = c0; c < c1; ++c) out(c, r) = in(r, c);
    }
  });
}

} // namespace focusdetail

struct HyperbolaFit {
  double zero_doppler_time = 0.0;
  double zero_doppler_range = 0.0;
  double effective_velocity = 0.0;
};

// Least-squares fit of R(t)^2 = R0^2 + v^2 (t - t0)^2 to the true range
// history of a reference target over the processed aperture.
inline HyperbolaFit fit_effective_velocity(const CollectionPlan& plan,
                                           const Vec3& reference_target,
                                           double half_span) {
  ZeroDopplerSolution zd =
      zero_doppler_solve(plan.geom.orbit, reference_target, plan.start_time - 2.0,
                         plan.stop_time + 2.0, plan.ellipsoid);
  const int n = 25;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    double tau = -half_span + 2.0 * half_span * i / (n - 1);
    if (std::abs(tau) < 1e-6) continue;
    StateVector s =
        propagate_orbit(plan.geom.orbit, zd.azimuth_time + tau, plan.ellipsoid);
    double r = norm(reference_target - s.position);
    num += (r * r - zd.slant_range * zd.slant_range) * tau * tau;
    den += tau * tau * tau * tau;
  }
  HyperbolaFit fit;
  fit.zero_doppler_time = zd.azimuth_time;
  fit.zero_doppler_range = zd.slant_range;
  fit.effective_velocity = std::sqrt(num / den);
  return fit;
}

// Range-Doppler focusing for zero-Doppler-steered stripmap collections:
// range compression, azimuth FFT, RCMC by banked sinc interpolation, azimuth
// matched multiply over the processed band, inverse FFT.
inline FocusedImage focus_range_doppler(const RawDataMatrix& raw,
                                        const FocusConfig& cfg) {
  const CollectionPlan& plan = raw.plan;
  if (plan.geom.mode != ImagingMode::kStripmap)
    throw Error(ErrorCode::kModeUnsupported,
                "range-Doppler path handles stripmap only; route spotlight to "
                "back-projection");
  cfg.validate(plan.geom.mode, plan.prf);

  const std::size_t n_pulses = raw.samples.rows();
  const std::size_t n_range = raw.samples.cols();
  const double fs = plan.chirp.sample_rate;
  const double wavelength = plan.chirp.wavelength();
  const double prf = plan.prf;

  // Range compression.
  focusdetail::RangeCompressor rc(plan, cfg.range_window, cfg.band_fraction,
                                  cfg.equalize_range_spectrum);
  Array2D<std::complex<float>> compressed(n_pulses, n_range);
  par_for(n_pulses, [&](std::size_t ip) {
    rc.compress_row(raw.samples.row(ip), compressed.row(ip));
  });

  // Scene-center references.
  Vec3 center = scene_center_point(plan);
  double v_g = footprint_ground_velocity(plan);
  StateVector center_state =
      propagate_orbit(plan.geom.orbit, plan.center_time(), plan.ellipsoid);
  double v_s = norm(center_state.velocity);
  double ka_guess = 2.0 * v_s * v_g / (wavelength * norm(center - center_state.position));
  double half_span = std::min(0.6 * cfg.processed_doppler_bandwidth / ka_guess,
                              0.45 * (plan.stop_time - plan.start_time));
  HyperbolaFit fit = fit_effective_velocity(plan, center, half_span);
  double v_eff = fit.effective_velocity;

  // Azimuth FFT per range gate.
  std::size_t n_az = focusdetail::next_fast_fft(n_pulses);
  Array2D<std::complex<float>> byrange;
  focusdetail::transpose(compressed, byrange);
  compressed = Array2D<std::complex<float>>();
  Array2D<std::complex<float>> spectra(n_range, n_az);
  par_for(n_range, [&](std::size_t j) {
    std::vector<std::complex<float>> buf(n_az, 0.0f);
    std::copy(byrange.row(j), byrange.row(j) + n_pulses, buf.begin());
    fft_inplace(buf.data(), n_az);
    std::copy(buf.begin(), buf.end(), spectra.row(j));
  });
  byrange = Array2D<std::complex<float>>();

  Array2D<std::complex<float>> dopplers;
  focusdetail::transpose(spectra, dopplers);
  spectra = Array2D<std::complex<float>>();

  // RCMC and azimuth matched filter in the range-Doppler domain.
  const double half_dop = 0.5 * cfg.band_fraction * cfg.processed_doppler_bandwidth;
  const double r_start = raw.range_window_start * kSpeedOfLight / 2.0;
  const double dr = kSpeedOfLight / (2.0 * fs);
  focusdetail::InterpKernel kernel(cfg.rcmc_kernel_taps);

  // In-band window sum over the Doppler grid, for peak normalization.
  double window_sum = 0.0;
  std::size_t band_bins = 0;
  for (std::size_t k = 0; k < n_az; ++k) {
    double f = fft_bin_frequency(k, n_az, prf);
    if (std::abs(f) > half_dop) continue;
    window_sum += cfg.azimuth_window.value(f / half_dop);
    ++band_bins;
  }
  if (band_bins == 0)
    throw Error(ErrorCode::kInvalidParams, "processed band contains no Doppler bins");

  double az_noise_gain = 0.0;
  std::vector<double> az_gain_center(n_az, 0.0);
  par_for(n_az, [&](std::size_t k) {
    std::complex<float>* row = dopplers.row(k);
    double f = fft_bin_frequency(k, n_az, prf);
    if (std::abs(f) > half_dop) {
      std::fill(row, row + n_range, std::complex<float>(0.0f, 0.0f));
      return;
    }
    double x = wavelength * f / (2.0 * v_eff);
    double beta = std::sqrt(1.0 - x * x);

    double weight = cfg.azimuth_window.value(f / half_dop);
    if (cfg.flatten_azimuth_pattern) {
      // Two-way azimuth amplitude pattern at this Doppler frequency.
      double arg = cfg.antenna_length * f / (2.0 * v_s);
      double amp = sinc(arg);
      amp *= amp;
      weight /= std::max(amp, 0.05);
    }

    std::vector<std::complex<float>> src(row, row + n_range);
    for (std::size_t j = 0; j < n_range; ++j) {
      double r0 = r_start + j * dr;
      double shift = r0 * (1.0 / beta - 1.0) / dr;
      std::complex<double> v = kernel.sample(src.data(), n_range, j + shift);

      double ka = 2.0 * v_eff * v_eff / (wavelength * r0);
      double norm_gain = std::sqrt(ka) * static_cast<double>(n_az) / (prf * window_sum);
      double phase = 4.0 * kPi * r0 * beta / wavelength;
      std::complex<double> h{std::cos(phase), std::sin(phase)};
      h *= weight * norm_gain;
      v *= h;
      row[j] = std::complex<float>(static_cast<float>(v.real()),
                                   static_cast<float>(v.imag()));
      if (j == n_range / 2) az_gain_center[k] = std::norm(h);
    }
  });
  for (double g : az_gain_center) az_noise_gain += g;
  az_noise_gain /= static_cast<double>(n_az);

  // Back to azimuth time.
  Array2D<std::complex<float>> byrange2;
  focusdetail::transpose(dopplers, byrange2);
  dopplers = Array2D<std::complex<float>>();
  par_for(n_range, [&](std::size_t j) { ifft_inplace(byrange2.row(j), n_az); });
  Array2D<std::complex<float>> full;
  focusdetail::transpose(byrange2, full);
  byrange2 = Array2D<std::complex<float>>();

  FocusedImage img;
  img.pixels = Array2D<std::complex<float>>(n_pulses, n_range);
  for (std::size_t r = 0; r < n_pulses; ++r)
    std::copy(full.row(r), full.row(r) + n_range, img.pixels.row(r));
  img.azimuth_time_start = raw.pulse_times.front();
  img.azimuth_time_step = 1.0 / prf;
  img.slant_range_start = r_start;
  img.slant_range_step = dr;
  img.config = cfg;
  img.plan = plan;
  img.effective_velocity = v_eff;
  img.ground_velocity = v_g;
  img.doppler_rate_center =
      2.0 * v_eff * v_eff / (wavelength * fit.zero_doppler_range);
  img.noise_power_gain =
      rc.noise_power_gain() * az_noise_gain * kernel.mean_energy();
  return img;
}

struct ImageGrid {
  double azimuth_time_start = 0.0;
  double azimuth_time_step = 0.0;
  std::size_t azimuth_count = 0;
  double slant_range_start = 0.0;
  double slant_range_step = 0.0;
  std::size_t range_count = 0;
};

// Time-domain back-projection onto a zero-Doppler (azimuth time, slant
// range) grid: exact per-pulse geometry, aperture limited to the processed
// Doppler band, azimuth pattern deconvolved per pulse.
inline FocusedImage focus_backprojection(const RawDataMatrix& raw,
                                         const FocusConfig& cfg,
                                         const ImageGrid& grid) {
  const CollectionPlan& plan = raw.plan;
  if (grid.azimuth_count == 0 || grid.range_count == 0)
    throw Error(ErrorCode::kInvalidParams, "empty back-projection grid");
  cfg.azimuth_window.validate();

  const std::size_t n_pulses = raw.samples.rows();
  const std::size_t n_range = raw.samples.cols();
  const double fs = plan.chirp.sample_rate;
  const double wavelength = plan.chirp.wavelength();
  const int os = 8;

  double grid_t0 = grid.azimuth_time_start;
  double grid_t1 = grid.azimuth_time_start + (grid.azimuth_count - 1) * grid.azimuth_time_step;
  if (grid_t0 < raw.pulse_times.front() - 1e-9 ||
      grid_t1 > raw.pulse_times.back() + 1e-9)
    throw Error(ErrorCode::kGridOutsideCollection,
                "grid azimuth extent outside the collection");

  focusdetail::RangeCompressor rc(plan, cfg.range_window, cfg.band_fraction,
                                  cfg.equalize_range_spectrum);

  // Pixel positions on the scene surface, cached per grid node.
  std::vector<Vec3> positions(grid.azimuth_count * grid.range_count);
  par_for(grid.azimuth_count, [&](std::size_t r) {
    double t = grid.azimuth_time_start + r * grid.azimuth_time_step;
    StateVector s = propagate_orbit(plan.geom.orbit, t, plan.ellipsoid);
    ZeroDopplerFrame frame(s, plan.geom.look_side, plan.geom.scene_height,
                           plan.ellipsoid);
    for (std::size_t c = 0; c < grid.range_count; ++c) {
      double range = grid.slant_range_start + c * grid.slant_range_step;
      double gamma = geodetail::look_angle_for_slant(frame, range);
      positions[r * grid.range_count + c] = frame.surface_point(gamma);
    }
  });

  Array2D<std::complex<double>> accum(grid.azimuth_count, grid.range_count);
  Array2D<double> wsum(grid.azimuth_count, grid.range_count);
  const double half_dop = 0.5 * cfg.band_fraction * cfg.processed_doppler_bandwidth;

  const std::size_t batch = 256;
  Array2D<std::complex<float>> profiles(batch, n_range * os);
  std::vector<simdetail::PulseFrame> frames(batch);
  bool window_violation = false;

  for (std::size_t b0 = 0; b0 < n_pulses; b0 += batch) {
    std::size_t b1 = std::min(n_pulses, b0 + batch);
    par_for(b1 - b0, [&](std::size_t i) {
      rc.compress_row_oversampled(raw.samples.row(b0 + i), os, profiles.row(i));
      frames[i] = simdetail::make_pulse_frame(plan, raw.pulse_times[b0 + i]);
    });

    par_for(grid.azimuth_count, [&](std::size_t r) {
      for (std::size_t c = 0; c < grid.range_count; ++c) {
        const Vec3& x = positions[r * grid.range_count + c];
        std::complex<double> acc = accum(r, c);
        double ws = wsum(r, c);
        for (std::size_t i = 0; i < b1 - b0; ++i) {
          const auto& f = frames[i];
          Vec3 d = x - f.state.position;
          double range = norm(d);
          double fd = 2.0 * dot(f.state.velocity, d) / (wavelength * range);
          if (std::abs(fd) > half_dop) continue;

          double pos = ((2.0 * range / kSpeedOfLight) - raw.range_window_start) * fs * os;
          long p0 = static_cast<long>(std::floor(pos));
          if (p0 < 0 || p0 + 1 >= static_cast<long>(n_range) * os) {
            window_violation = true;
            continue;
          }
          double mu = pos - p0;
          const std::complex<float>* prof = profiles.row(i);
          std::complex<double> sample =
              (1.0 - mu) * std::complex<double>(prof[p0]) +
              mu * std::complex<double>(prof[p0 + 1]);

          double w = cfg.azimuth_window.value(fd / half_dop);
          if (cfg.flatten_azimuth_pattern) {
            double az = std::asin(dot(d, f.v_hat) / range) - f.boresight_az;
            double amp = sinc(cfg.antenna_length * std::sin(az) / wavelength);
            amp *= amp;
            sample /= std::max(amp, 0.05);
          }
          double phase = 4.0 * kPi * range / wavelength;
          acc += w * sample * std::complex<double>(std::cos(phase), std::sin(phase));
          ws += w;
        }
        accum(r, c) = acc;
        wsum(r, c) = ws;
      }
    });
  }
  if (window_violation)
    throw Error(ErrorCode::kGridOutsideCollection,
                "grid range extent outside the receive window");

  FocusedImage img;
  img.pixels = Array2D<std::complex<float>>(grid.azimuth_count, grid.range_count);
  for (std::size_t r = 0; r < grid.azimuth_count; ++r)
    for (std::size_t c = 0; c < grid.range_count; ++c) {
      if (wsum(r, c) <= 0.0)
        throw Error(ErrorCode::kGridOutsideCollection,
                    "grid node sees no pulses in the processed band");
      std::complex<double> v = accum(r, c) / wsum(r, c);
      img.pixels(r, c) = std::complex<float>(static_cast<float>(v.real()),
                                             static_cast<float>(v.imag()));
    }
  img.azimuth_time_start = grid.azimuth_time_start;
  img.azimuth_time_step = grid.azimuth_time_step;
  img.slant_range_start = grid.slant_range_start;
  img.slant_range_step = grid.slant_range_step;
  img.config = cfg;
  img.config.algorithm = FocusAlgorithm::kBackprojection;
  img.plan = plan;
  img.ground_velocity = footprint_ground_velocity(plan);
  img.noise_power_gain = rc.noise_power_gain();
  return img;
}

// Convenience grid centered on a reference target. With the default steps
// the grid snaps onto the raw-data sample lattice, so chips cut here are
// directly comparable (including the per-sample phase convention) with a
// full range-Doppler image of the same collection.
inline ImageGrid chip_grid_around(const RawDataMatrix& raw, const Vec3& target,
                                  std::size_t azimuth_count, std::size_t range_count,
                                  double azimuth_time_step = 0.0) {
  const CollectionPlan& plan = raw.plan;
  ZeroDopplerSolution zd =
      zero_doppler_solve(plan.geom.orbit, target, plan.start_time - 1.0,
                         plan.stop_time + 1.0, plan.ellipsoid);
  ImageGrid grid;
  grid.azimuth_time_step = azimuth_time_step > 0.0 ? azimuth_time_step : 1.0 / plan.prf;
  grid.slant_range_step = kSpeedOfLight / (2.0 * plan.chirp.sample_rate);
  grid.azimuth_count = azimuth_count;
  grid.range_count = range_count;
  double t_begin =
      zd.azimuth_time - 0.5 * static_cast<double>(azimuth_count - 1) * grid.azimuth_time_step;
  double r_begin =
      zd.slant_range - 0.5 * static_cast<double>(range_count - 1) * grid.slant_range_step;
  double t_lattice = raw.pulse_times.front();
  double r_lattice = raw.range_window_start * kSpeedOfLight / 2.0;
  grid.azimuth_time_start =
      t_lattice +
      std::round((t_begin - t_lattice) / grid.azimuth_time_step) * grid.azimuth_time_step;
  grid.slant_range_start =
      r_lattice +
      std::round((r_begin - r_lattice) / grid.slant_range_step) * grid.slant_range_step;
  return grid;
}

// Azimuth-resolution bookkeeping: window broadening over the processed band,
// floored at half the antenna length.
inline double stripmap_azimuth_resolution(const FocusConfig& cfg,
                                          double ground_velocity) {
  if (!(cfg.processed_doppler_bandwidth > 0.0))
    throw Error(ErrorCode::kInvalidParams, "processed bandwidth must be positive");
  double kappa = window_broadening_factor(cfg.azimuth_window);
  double res = kappa * ground_velocity / cfg.processed_doppler_bandwidth;
  return std::max(res, cfg.antenna_length / 2.0);
}

} // namespace sar
