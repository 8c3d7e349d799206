#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sar/constants.hpp"
#include "sar/error.hpp"
#include "sar/focus.hpp"
#include "sar/geometry.hpp"
#include "sar/mat2d.hpp"
#include "sar/parallel.hpp"

namespace sar {

struct ProductMetadata {
  double calibration_constant = 1.0; // beta0 = K (dn * quantization_scale)^2
  double quantization_scale = 1.0;
  double scene_height = 0.0;
  ImagingMode mode = ImagingMode::kStripmap;
  LookSide look_side = LookSide::kRight;
  WindowSpec range_window;
  WindowSpec azimuth_window;
  std::string processor_version = "sarpipe 0.1";
  std::string ground_range_convention = "ellipsoid-arc";
  std::string detection; // empty for SLC

  // Acquisition and processing annotations.
  CollectionPlan plan;
  double band_fraction = kSincHalfPowerWidth;
  double processed_doppler_bandwidth = 0.0;
  double ground_velocity = 0.0;
  double effective_velocity = 0.0;
  double noise_power_gain = 1.0;
  double azimuth_time_start = 0.0;
  double slant_range_start = 0.0;
};

struct SLCProduct {
  Array2D<std::complex<float>> pixels; // azimuth x slant range
  double range_spacing = 0.0;          // m
  double azimuth_spacing = 0.0;        // m (ground-equivalent)
  double azimuth_time_step = 0.0;      // s
  ProductMetadata metadata;

  double slant_range(std::size_t col) const {
    return metadata.slant_range_start + col * range_spacing;
  }
  double azimuth_time(std::size_t row) const {
    return metadata.azimuth_time_start + row * azimuth_time_step;
  }
};

struct GRDProduct {
  Array2D<int16_t> pixels; // azimuth x ground range
  double ground_spacing = 0.0;
  double azimuth_spacing = 0.0;
  int looks_range = 1;
  int looks_azimuth = 1;
  double ground_origin = 0.0;       // ground range of column 0, m from nadir track
  double azimuth_time_origin = 0.0; // zero-Doppler time of row 0, s
  ProductMetadata metadata;
};

// Non-overlapping box average of detected intensity.
inline Array2D<float> multilook_intensity(const Array2D<float>& intensity,
                                          int looks_azimuth, int looks_range) {
  if (looks_azimuth < 1 || looks_range < 1)
    throw Error(ErrorCode::kInvalidParams, "look counts must be positive");
  std::size_t rows = intensity.rows() / looks_azimuth;
  std::size_t cols = intensity.cols() / looks_range;
  Array2D<float> out(rows, cols);
  par_for(rows, [&](std::size_t r) {
    for (std::size_t c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int i = 0; i < looks_azimuth; ++i)
        for (int j = 0; j < looks_range; ++j)
          acc += intensity(r * looks_azimuth + i, c * looks_range + j);
      out(r, c) = static_cast<float>(acc / (looks_azimuth * looks_range));
    }
  });
  return out;
}

enum class ScalePolicy { kPercentile999, kFixed };

struct QuantizationResult {
  Array2D<int16_t> values;
  double scale = 1.0;
  double clipped_fraction = 0.0;
  bool all_zero = false;
};

// round(pixel/scale) clipped to [0, 32767]. PERCENTILE_999 maps the 99.9th
// percentile to 90% of full scale.
inline QuantizationResult quantize_int16(const Array2D<float>& pixels,
                                         ScalePolicy policy,
                                         double fixed_scale = 1.0) {
  QuantizationResult out;
  out.values = Array2D<int16_t>(pixels.rows(), pixels.cols());

  double scale = fixed_scale;
  if (policy == ScalePolicy::kPercentile999) {
    std::vector<float> copy(pixels.storage());
    std::size_t idx = static_cast<std::size_t>(0.999 * (copy.size() - 1));
    std::nth_element(copy.begin(), copy.begin() + idx, copy.end());
    double p999 = copy[idx];
    if (p999 <= 0.0) {
      out.all_zero = true; // scale 1 by convention, flagged
      scale = 1.0;
    } else {
      scale = p999 / (0.9 * 32767.0);
    }
  } else if (!(fixed_scale > 0.0)) {
    throw Error(ErrorCode::kInvalidParams, "fixed quantization scale must be positive");
  }

  std::size_t clipped = 0;
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    float v = pixels.data()[i];
    if (!(v >= 0.0f) || !std::isfinite(v))
      throw Error(ErrorCode::kInvalidParams, "pixels must be finite and non-negative");
    long q = std::lround(v / scale);
    if (q > 32767) {
      q = 32767;
      ++clipped;
    }
    out.values.data()[i] = static_cast<int16_t>(q);
  }
  out.scale = scale;
  out.clipped_fraction =
      static_cast<double>(clipped) / static_cast<double>(pixels.size());
  return out;
}

// Calibrated radar brightness: beta0 = K (dn * scale)^2. For SLC pixels dn is
// the complex magnitude and the quantization scale is 1.
inline double radar_brightness(double dn, const ProductMetadata& metadata) {
  if (!(metadata.calibration_constant > 0.0))
    throw Error(ErrorCode::kMissingCalibration,
                "product carries no calibration constant");
  double v = dn * metadata.quantization_scale;
  return metadata.calibration_constant * v * v;
}

// Level-1 SLC: pixels carried through unweighted, axes re-expressed as
// spacings, metadata populated.
inline SLCProduct form_slc(const FocusedImage& img,
                           double calibration_constant = 1.0) {
  if (img.config.range_window.family != WindowFamily::kUniform)
    throw Error(ErrorCode::kWindowedInput,
                "SLC products require a uniform range window upstream");
  const CollectionPlan& plan = img.plan;

  SLCProduct slc;
  slc.pixels = img.pixels;
  slc.range_spacing = img.slant_range_step;
  slc.azimuth_time_step = img.azimuth_time_step;
  slc.azimuth_spacing = img.ground_velocity * img.azimuth_time_step;

  if (plan.geom.mode == ImagingMode::kStripmap) {
    // Catalog spacing bands apply to the 100-300 MHz stripmap products;
    // narrower experimental bandwidths are exempt from the range band.
    if (plan.chirp.bandwidth >= 100e6 &&
        (slc.range_spacing < 0.4 || slc.range_spacing > 1.3))
      throw Error(ErrorCode::kInvalidParams,
                  "stripmap SLC range spacing outside [0.4, 1.3] m");
    if (slc.azimuth_spacing < 1.4 || slc.azimuth_spacing > 1.7)
      throw Error(ErrorCode::kInvalidParams,
                  "stripmap SLC azimuth spacing outside [1.4, 1.7] m");
  }

  ProductMetadata& md = slc.metadata;
  md.calibration_constant = calibration_constant;
  md.quantization_scale = 1.0;
  md.scene_height = plan.geom.scene_height;
  md.mode = plan.geom.mode;
  md.look_side = plan.geom.look_side;
  md.range_window = img.config.range_window;
  md.azimuth_window = img.config.azimuth_window;
  md.plan = plan;
  md.band_fraction = img.config.band_fraction;
  md.processed_doppler_bandwidth = img.config.processed_doppler_bandwidth;
  md.ground_velocity = img.ground_velocity;
  md.effective_velocity = img.effective_velocity;
  md.noise_power_gain = img.noise_power_gain;
  md.azimuth_time_start = img.azimuth_time_start;
  md.slant_range_start = img.slant_range_start;
  return slc;
}

namespace proddetail {

// Separable spectral re-weighting over the occupied band, energy-normalized
// so distributed power and point-target integrated energy are preserved.
inline void reweight_spectrum(Array2D<std::complex<float>>& pixels,
                              const WindowSpec& window, double band_fraction,
                              double bandwidth, double sample_rate,
                              double doppler_bandwidth, double prf) {
  auto weights = [&](std::size_t n, double occupied, double fs) {
    std::vector<float> w(n, 0.0f);
    double half = 0.5 * occupied;
    double energy = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < n; ++k) {
      double f = fft_bin_frequency(k, n, fs);
      if (std::abs(f) > half) continue;
      double v = window.value(f / half);
      w[k] = static_cast<float>(v);
      energy += v * v;
      ++count;
    }
    float norm = static_cast<float>(std::sqrt(energy / count));
    for (auto& v : w) v /= norm;
    return w;
  };

  // Range direction.
  std::size_t nc = next_pow2(pixels.cols());
  auto wr = weights(nc, band_fraction * bandwidth, sample_rate);
  par_for(pixels.rows(), [&](std::size_t r) {
    std::vector<std::complex<float>> buf(nc, 0.0f);
    std::copy(pixels.row(r), pixels.row(r) + pixels.cols(), buf.begin());
    fft_inplace(buf.data(), nc);
    for (std::size_t k = 0; k < nc; ++k) buf[k] *= wr[k];
    ifft_inplace(buf.data(), nc);
    std::copy(buf.begin(), buf.begin() + pixels.cols(), pixels.row(r));
  });

  // Azimuth direction.
  std::size_t nr = next_pow2(pixels.rows());
  auto wa = weights(nr, band_fraction * doppler_bandwidth, prf);
  Array2D<std::complex<float>> t;
  focusdetail::transpose(pixels, t);
  par_for(t.rows(), [&](std::size_t r) {
    std::vector<std::complex<float>> buf(nr, 0.0f);
    std::copy(t.row(r), t.row(r) + t.cols(), buf.begin());
    fft_inplace(buf.data(), nr);
    for (std::size_t k = 0; k < nr; ++k) buf[k] *= wa[k];
    ifft_inplace(buf.data(), nr);
    std::copy(buf.begin(), buf.begin() + t.cols(), t.row(r));
  });
  focusdetail::transpose(t, pixels);
}

// Cubic convolution kernel (a = -0.5).
inline double cubic_kernel(double x) {
  double ax = std::abs(x);
  if (ax < 1.0) return 1.0 + ax * ax * (1.5 * ax - 2.5);
  if (ax < 2.0) return -0.5 * (ax - 1.0) * (ax - 2.0) * (ax - 2.0) + 0.5 * (2.0 - ax);
  return 0.0;
}

inline double cubic_interp(const std::vector<double>& v, double pos) {
  long base = static_cast<long>(std::floor(pos));
  double acc = 0.0, wsum = 0.0;
  for (long k = base - 1; k <= base + 2; ++k) {
    long idx = std::clamp<long>(k, 0, static_cast<long>(v.size()) - 1);
    double w = cubic_kernel(pos - static_cast<double>(k));
    acc += w * v[idx];
    wsum += w;
  }
  return acc / wsum;
}

} // namespace proddetail

// Local ground-step ratio of the slant grid projected to ground: max over
// min step. Strictly above 1 for a finite swath; the GRD output grid is
// equidistant by construction.
inline double ground_step_ratio(const SLCProduct& slc,
                                const AcquisitionGeometry& geom) {
  const CollectionPlan& plan = slc.metadata.plan;
  StateVector ref = propagate_orbit(plan.geom.orbit, plan.center_time(), plan.ellipsoid);
  std::size_t n = std::min<std::size_t>(slc.pixels.cols(), 33);
  double step = static_cast<double>(slc.pixels.cols() - 1) / (n - 1);
  double min_d = 1e300, max_d = 0.0;
  double prev = slant_to_ground(slc.slant_range(0), geom, ref, plan.ellipsoid);
  for (std::size_t i = 1; i < n; ++i) {
    double g = slant_to_ground(slc.slant_range(static_cast<std::size_t>(i * step)),
                               geom, ref, plan.ellipsoid);
    double d = (g - prev) / step;
    min_d = std::min(min_d, d);
    max_d = std::max(max_d, d);
    prev = g;
  }
  return max_d / min_d;
}

// Ground Range Detected product: spectral re-weighting, detection, multilook
// averaging, projection onto an equidistant ground grid (cubic convolution,
// slant-area scaling applied so beta0 is preserved), 16-bit quantization.
inline GRDProduct form_grd(const SLCProduct& slc, double target_spacing,
                           const WindowSpec& window,
                           const AcquisitionGeometry& geom,
                           ScalePolicy policy = ScalePolicy::kPercentile999,
                           double fixed_scale = 1.0) {
  window.validate(/*for_grd=*/true);
  if (!(target_spacing > 0.0))
    throw Error(ErrorCode::kInvalidParams, "target spacing must be positive");
  const ProductMetadata& md = slc.metadata;
  const CollectionPlan& plan = md.plan;

  // Spectral shaping on a working copy.
  Array2D<std::complex<float>> shaped = slc.pixels;
  proddetail::reweight_spectrum(shaped, window, md.band_fraction,
                                plan.chirp.bandwidth, plan.chirp.sample_rate,
                                md.processed_doppler_bandwidth, plan.prf);

  // Detection.
  Array2D<float> intensity(shaped.rows(), shaped.cols());
  for (std::size_t i = 0; i < shaped.size(); ++i)
    intensity.data()[i] = std::norm(shaped.data()[i]);
  shaped = Array2D<std::complex<float>>();

  // Look counts to approximately square, never upsampling.
  double theta_c = geom.center_incidence_deg * kDegToRad;
  double ground_px = slc.range_spacing / std::sin(theta_c);
  if (slc.azimuth_spacing > target_spacing * (1.0 + 1e-9) ||
      ground_px > target_spacing * (1.0 + 1e-9))
    throw Error(ErrorCode::kSpacingUnreachable,
                "native spacing is coarser than the requested ground grid");
  int looks_az = std::max(1, static_cast<int>(target_spacing / slc.azimuth_spacing));
  int looks_rg = std::max(1, static_cast<int>(target_spacing / ground_px));

  Array2D<float> looked = multilook_intensity(intensity, looks_az, looks_rg);
  std::size_t ml_rows = looked.rows();
  std::size_t ml_cols = looked.cols();
  intensity = Array2D<float>();

  // Multilooked axes.
  double ml_az_spacing = slc.azimuth_spacing * looks_az;
  double ml_rg_spacing = slc.range_spacing * looks_rg;
  double ml_r0 = md.slant_range_start + 0.5 * (looks_rg - 1) * slc.range_spacing;

  // Slant-to-ground mapping, shared by every azimuth row.
  StateVector ref = propagate_orbit(plan.geom.orbit, plan.center_time(), plan.ellipsoid);
  ZeroDopplerFrame frame(ref, geom.look_side, geom.scene_height, plan.ellipsoid);
  double g_first = frame.arc_length(
      geodetail::look_angle_for_slant(frame, ml_r0));
  double g_last = frame.arc_length(geodetail::look_angle_for_slant(
      frame, ml_r0 + (ml_cols - 1) * ml_rg_spacing));
  double g_start = std::ceil(g_first / target_spacing) * target_spacing;
  std::size_t out_cols =
      static_cast<std::size_t>(std::floor((g_last - g_start) / target_spacing)) + 1;
  if (out_cols < 4)
    throw Error(ErrorCode::kSpacingUnreachable, "swath narrower than four GRD pixels");

  std::vector<double> slant_pos(out_cols);
  std::vector<double> area_scale(out_cols);
  par_for(out_cols, [&](std::size_t k) {
    double g = g_start + k * target_spacing;
    double gamma = geodetail::look_angle_for_arc(frame, g);
    double slant = frame.slant_range(gamma);
    slant_pos[k] = (slant - ml_r0) / ml_rg_spacing;
    Vec3 p = frame.surface_point(gamma);
    double inc = incidence_angle_deg(ref, p, plan.ellipsoid) * kDegToRad;
    area_scale[k] = std::sin(inc);
  });

  // Azimuth resample to the target spacing, then project each row.
  std::size_t out_rows = static_cast<std::size_t>(
      std::floor((ml_rows - 1) * ml_az_spacing / target_spacing)) + 1;
  Array2D<float> amplitude(out_rows, out_cols);
  par_for(out_rows, [&](std::size_t r) {
    double src_row = r * target_spacing / ml_az_spacing;
    long base = static_cast<long>(std::floor(src_row));
    // Cubic along azimuth first.
    std::vector<double> row(ml_cols);
    for (std::size_t c = 0; c < ml_cols; ++c) {
      double acc = 0.0, wsum = 0.0;
      for (long k = base - 1; k <= base + 2; ++k) {
        long idx = std::clamp<long>(k, 0, static_cast<long>(ml_rows) - 1);
        double w = proddetail::cubic_kernel(src_row - static_cast<double>(k));
        acc += w * looked(idx, c);
        wsum += w;
      }
      row[c] = acc / wsum;
    }
    for (std::size_t k = 0; k < out_cols; ++k) {
      double v = proddetail::cubic_interp(row, slant_pos[k]) * area_scale[k];
      amplitude(r, k) = static_cast<float>(std::sqrt(std::max(0.0, v)));
    }
  });
  looked = Array2D<float>();

  QuantizationResult q = quantize_int16(amplitude, policy, fixed_scale);
  if (q.clipped_fraction > 1e-3)
    throw Error(ErrorCode::kSaturationExceeded,
                "more than 0.1% of GRD pixels clipped");

  GRDProduct grd;
  grd.pixels = std::move(q.values);
  grd.ground_spacing = target_spacing;
  grd.azimuth_spacing = target_spacing;
  grd.looks_range = looks_rg;
  grd.looks_azimuth = looks_az;
  grd.ground_origin = g_start;
  grd.azimuth_time_origin =
      md.azimuth_time_start + 0.5 * (looks_az - 1) / plan.prf;
  grd.metadata = md;
  grd.metadata.quantization_scale = q.scale;
  grd.metadata.range_window = window;
  grd.metadata.azimuth_window = window;
  grd.metadata.detection = "amplitude of multilooked power, slant-area scaled";
  return grd;
}

} // namespace sar
