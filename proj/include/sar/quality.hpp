#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <vector>

#include "sar/constants.hpp"
#include "sar/error.hpp"
#include "sar/fft.hpp"
#include "sar/mat2d.hpp"

namespace sar {

// Oversampled impulse-response chip, re-centered on the interpolated peak.
// Rows are azimuth, columns range; spacings are per original pixel.
struct IRFChip {
  Array2D<std::complex<float>> pixels;
  double azimuth_spacing = 1.0; // m per original pixel
  double range_spacing = 1.0;   // m per original pixel
  int oversample = 16;
  double peak_power = 0.0;
  // Sub-pixel peak position in the source raster (row, col).
  double source_peak_row = 0.0;
  double source_peak_col = 0.0;
};

enum class IrfAxis { kRange, kAzimuth };
enum class MainlobePolicy { kFirstNull, kKTimesRes };

struct IRFReport {
  double pslr_range_db = 0.0;
  double pslr_azimuth_db = 0.0;
  double islr_range_db = 0.0;
  double islr_azimuth_db = 0.0;
  double resolution_range_m = 0.0;
  double resolution_azimuth_m = 0.0;
  double peak_row = 0.0;
  double peak_col = 0.0;
  double peak_power = 0.0;
};

namespace qualdetail {

// 2-D spectral zero-padding by `os` per axis. Input chip must be
// Nyquist-sampled; output is scaled so values interpolate the input.
inline Array2D<std::complex<float>> oversample2d(
    const Array2D<std::complex<float>>& chip, int os,
    double shift_rows = 0.0, double shift_cols = 0.0) {
  std::size_t nr = chip.rows(), nc = chip.cols();
  std::size_t br = nr * os, bc = nc * os;

  // Forward 2-D FFT of the chip.
  Array2D<std::complex<float>> spec(nr, nc);
  std::vector<std::complex<float>> buf(std::max(nr, nc));
  for (std::size_t r = 0; r < nr; ++r) {
    std::copy(chip.row(r), chip.row(r) + nc, buf.begin());
    fft_inplace(buf.data(), nc);
    std::copy(buf.begin(), buf.begin() + nc, spec.row(r));
  }
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t r = 0; r < nr; ++r) buf[r] = spec(r, c);
    fft_inplace(buf.data(), nr);
    for (std::size_t r = 0; r < nr; ++r) spec(r, c) = buf[r];
  }

  // Optional sub-pixel shift via a phase ramp (signed bin indices).
  if (shift_rows != 0.0 || shift_cols != 0.0) {
    for (std::size_t r = 0; r < nr; ++r) {
      double fr = (r <= nr / 2) ? static_cast<double>(r)
                                : static_cast<double>(r) - static_cast<double>(nr);
      for (std::size_t c = 0; c < nc; ++c) {
        double fc = (c <= nc / 2) ? static_cast<double>(c)
                                  : static_cast<double>(c) - static_cast<double>(nc);
        double phase = -2.0 * kPi * (fr * shift_rows / nr + fc * shift_cols / nc);
        spec(r, c) *= std::complex<float>(static_cast<float>(std::cos(phase)),
                                          static_cast<float>(std::sin(phase)));
      }
    }
  }

  // Zero-pad into the enlarged spectrum, quadrant by quadrant.
  Array2D<std::complex<float>> pad(br, bc);
  auto dst_row = [&](std::size_t r) { return r < nr / 2 ? r : br - nr + r; };
  auto dst_col = [&](std::size_t c) { return c < nc / 2 ? c : bc - nc + c; };
  for (std::size_t r = 0; r < nr; ++r)
    for (std::size_t c = 0; c < nc; ++c) pad(dst_row(r), dst_col(c)) = spec(r, c);

  std::vector<std::complex<float>> big(std::max(br, bc));
  for (std::size_t r = 0; r < br; ++r) {
    std::copy(pad.row(r), pad.row(r) + bc, big.begin());
    ifft_inplace(big.data(), bc);
    std::copy(big.begin(), big.begin() + bc, pad.row(r));
  }
  float scale = static_cast<float>(os) * static_cast<float>(os);
  for (std::size_t c = 0; c < bc; ++c) {
    for (std::size_t r = 0; r < br; ++r) big[r] = pad(r, c);
    ifft_inplace(big.data(), br);
    for (std::size_t r = 0; r < br; ++r) pad(r, c) = big[r] * scale;
  }
  return pad;
}

struct PeakFit {
  double row, col, power;
};

// Quadratic refinement of a power peak over its 3x3 neighborhood.
inline PeakFit refine_peak(const Array2D<std::complex<float>>& img,
                           std::size_t r0, std::size_t c0) {
  auto p = [&](std::size_t r, std::size_t c) {
    return static_cast<double>(std::norm(img(r, c)));
  };
  PeakFit fit{static_cast<double>(r0), static_cast<double>(c0), p(r0, c0)};
  if (r0 == 0 || c0 == 0 || r0 + 1 >= img.rows() || c0 + 1 >= img.cols())
    return fit;
  double dr_num = p(r0 - 1, c0) - p(r0 + 1, c0);
  double dr_den = p(r0 - 1, c0) - 2.0 * p(r0, c0) + p(r0 + 1, c0);
  double dc_num = p(r0, c0 - 1) - p(r0, c0 + 1);
  double dc_den = p(r0, c0 - 1) - 2.0 * p(r0, c0) + p(r0, c0 + 1);
  double dr = (dr_den < 0.0) ? 0.5 * dr_num / dr_den : 0.0;
  double dc = (dc_den < 0.0) ? 0.5 * dc_num / dc_den : 0.0;
  fit.row += std::clamp(dr, -0.5, 0.5);
  fit.col += std::clamp(dc, -0.5, 0.5);
  fit.power = p(r0, c0) - 0.25 * (dr_num * dr + dc_num * dc);
  return fit;
}

inline std::pair<std::size_t, std::size_t> argmax_power(
    const Array2D<std::complex<float>>& img) {
  std::size_t br = 0, bc = 0;
  double best = -1.0;
  for (std::size_t r = 0; r < img.rows(); ++r)
    for (std::size_t c = 0; c < img.cols(); ++c) {
      double v = std::norm(img(r, c));
      if (v > best) {
        best = v;
        br = r;
        bc = c;
      }
    }
  return {br, bc};
}

} // namespace qualdetail

// Cuts a chip around the approximate peak of a complex raster, oversamples it
// spectrally, and re-centers the interpolated peak on the center sample.
inline IRFChip extract_irf_from_image(const Array2D<std::complex<float>>& image,
                                      double azimuth_spacing, double range_spacing,
                                      int approx_row, int approx_col,
                                      int chip_size = 64, int oversample = 32) {
  if (oversample < 16)
    throw Error(ErrorCode::kInvalidParams, "oversample factor must be >= 16");
  if (chip_size < 8)
    throw Error(ErrorCode::kInvalidParams, "chip size must be >= 8");

  // Local re-detection of the integer peak within +/-3 pixels.
  std::size_t rows = image.rows(), cols = image.cols();
  long pr = approx_row, pc = approx_col;
  double best = -1.0;
  for (long r = std::max(0L, pr - 3); r <= std::min<long>(rows - 1, pr + 3); ++r)
    for (long c = std::max(0L, pc - 3); c <= std::min<long>(cols - 1, pc + 3); ++c) {
      double v = std::norm(image(r, c));
      if (v > best) {
        best = v;
        approx_row = static_cast<int>(r);
        approx_col = static_cast<int>(c);
      }
    }

  int half = chip_size / 2;
  long r0 = approx_row - half, c0 = approx_col - half;
  if (r0 < 0 || c0 < 0 || r0 + chip_size > static_cast<long>(rows) ||
      c0 + chip_size > static_cast<long>(cols))
    throw Error(ErrorCode::kPeakOnEdge, "chip would extend past the raster");

  Array2D<std::complex<float>> cut(chip_size, chip_size);
  for (int r = 0; r < chip_size; ++r)
    for (int c = 0; c < chip_size; ++c) cut(r, c) = image(r0 + r, c0 + c);

  // First pass: find the oversampled peak.
  auto big = qualdetail::oversample2d(cut, oversample);
  auto [br, bc] = qualdetail::argmax_power(big);
  auto fit = qualdetail::refine_peak(big, br, bc);

  // Re-extract with the fractional shift that puts the peak on the center
  // sample of the oversampled chip (content moves by -frac).
  double frac_row = fit.row / oversample - half;
  double frac_col = fit.col / oversample - half;
  auto centered = qualdetail::oversample2d(cut, oversample, -frac_row, -frac_col);

  IRFChip chip;
  chip.pixels = std::move(centered);
  chip.azimuth_spacing = azimuth_spacing;
  chip.range_spacing = range_spacing;
  chip.oversample = oversample;
  std::size_t center = static_cast<std::size_t>(half) * oversample;
  chip.peak_power = std::norm(chip.pixels(center, center));
  chip.source_peak_row = r0 + half + frac_row;
  chip.source_peak_col = c0 + half + frac_col;

  // Secondary-peak scan: anything above -10 dB outside the sidelobe cross
  // of the main response flags a contaminated chip.
  double gate = chip.peak_power * 0.1;
  std::size_t guard = static_cast<std::size_t>(3.0 * oversample);
  for (std::size_t r = 0; r < chip.pixels.rows(); r += 7)
    for (std::size_t c = 0; c < chip.pixels.cols(); c += 7) {
      bool on_cross = (r > center ? r - center : center - r) < guard ||
                      (c > center ? c - center : center - c) < guard;
      if (on_cross) continue;
      if (std::norm(chip.pixels(r, c)) > gate)
        throw Error(ErrorCode::kMultiplePeaks,
                    "secondary response above -10 dB inside the chip");
    }
  return chip;
}

namespace qualdetail {

// 1-D power cut through the chip center along the requested axis.
inline std::vector<double> center_cut(const IRFChip& chip, IrfAxis axis) {
  std::size_t n = (axis == IrfAxis::kRange) ? chip.pixels.cols() : chip.pixels.rows();
  std::size_t center_other = ((axis == IrfAxis::kRange) ? chip.pixels.rows()
                                                        : chip.pixels.cols()) /
                             2;
  std::vector<double> cut(n);
  for (std::size_t i = 0; i < n; ++i)
    cut[i] = (axis == IrfAxis::kRange)
                 ? std::norm(chip.pixels(center_other, i))
                 : std::norm(chip.pixels(i, center_other));
  return cut;
}

inline double cut_spacing(const IRFChip& chip, IrfAxis axis) {
  double px = (axis == IrfAxis::kRange) ? chip.range_spacing : chip.azimuth_spacing;
  return px / chip.oversample;
}

// Positions of the first local minima on both sides of the center peak.
inline std::pair<std::size_t, std::size_t> first_nulls(
    const std::vector<double>& cut, std::size_t center) {
  std::size_t left = center, right = center;
  while (right + 1 < cut.size() && cut[right + 1] < cut[right]) ++right;
  while (left > 0 && cut[left - 1] < cut[left]) --left;
  if (right + 1 >= cut.size() || left == 0)
    throw Error(ErrorCode::kNoSidelobeFound, "cut ends before the first null");
  return {left, right};
}

// Quadratic-refined maximum of cut[a..b].
inline double max_power_refined(const std::vector<double>& cut, std::size_t a,
                                std::size_t b) {
  std::size_t best = a;
  for (std::size_t i = a; i <= b && i < cut.size(); ++i)
    if (cut[i] > cut[best]) best = i;
  if (best == 0 || best + 1 >= cut.size()) return cut[best];
  double ym = cut[best - 1], y0 = cut[best], yp = cut[best + 1];
  double den = ym - 2.0 * y0 + yp;
  if (den >= 0.0) return y0;
  double d = 0.5 * (ym - yp) / den;
  return y0 - 0.25 * (ym - yp) * d;
}

} // namespace qualdetail

// Highest sidelobe relative to the mainlobe peak along the axis cut, dB.
inline double measure_pslr(const IRFChip& chip, IrfAxis axis) {
  auto cut = qualdetail::center_cut(chip, axis);
  std::size_t center = cut.size() / 2;
  auto [left, right] = qualdetail::first_nulls(cut, center);

  double peak = qualdetail::max_power_refined(cut, center - 1, center + 1);
  double sidelobe = std::max(
      qualdetail::max_power_refined(cut, right, cut.size() - 1),
      qualdetail::max_power_refined(cut, 0, left));
  if (sidelobe <= 0.0) return -120.0; // sentinel floor
  return linear_to_db(sidelobe / peak);
}

// -3 dB full width of the mainlobe along the axis cut, meters.
inline double measure_resolution(const IRFChip& chip, IrfAxis axis) {
  auto cut = qualdetail::center_cut(chip, axis);
  std::size_t center = cut.size() / 2;
  double threshold = cut[center] / 2.0;
  auto cross = [&](int dir) -> double {
    std::size_t i = center;
    for (;;) {
      long next = static_cast<long>(i) + dir;
      if (next < 0 || next >= static_cast<long>(cut.size()))
        throw Error(ErrorCode::kMainlobeClipped,
                    "mainlobe -3 dB point beyond the chip");
      if (cut[next] <= threshold) {
        double frac = (cut[i] - threshold) / (cut[i] - cut[next]);
        return std::abs(static_cast<double>(i) - static_cast<double>(center)) + frac;
      }
      i = static_cast<std::size_t>(next);
    }
  };
  double width = cross(+1) + cross(-1);
  return width * qualdetail::cut_spacing(chip, axis);
}

// The K_TIMES_RES mainlobe half-extent in units of the measured -3 dB
// resolution, calibrated once so an ideal sinc response reports -5.03 dB.
inline double islr_mainlobe_k();

// Integrated sidelobe ratio along the axis cut: sidelobe energy over
// mainlobe energy with the integration span fixed at +/-10 resolution cells.
inline double measure_islr(const IRFChip& chip, IrfAxis axis,
                           MainlobePolicy policy = MainlobePolicy::kKTimesRes,
                           double k_times_res = 0.0) {
  auto cut = qualdetail::center_cut(chip, axis);
  std::size_t center = cut.size() / 2;
  double res_m = measure_resolution(chip, axis);
  double res_samples = res_m / qualdetail::cut_spacing(chip, axis);

  double span = 10.0 * res_samples;
  if (center + span >= cut.size() - 1)
    throw Error(ErrorCode::kSpanExceedsChip,
                "10 resolution cells extend past the chip");

  double main_half = 0.0;
  if (policy == MainlobePolicy::kFirstNull) {
    auto [left, right] = qualdetail::first_nulls(cut, center);
    main_half = 0.5 * (static_cast<double>(right) - static_cast<double>(left));
  } else {
    double k = (k_times_res > 0.0) ? k_times_res : islr_mainlobe_k();
    main_half = k * res_samples;
  }

  double main = 0.0, total = 0.0;
  long lo = static_cast<long>(std::floor(center - span));
  long hi = static_cast<long>(std::ceil(center + span));
  for (long i = lo; i <= hi; ++i) {
    double d = std::abs(static_cast<double>(i) - static_cast<double>(center));
    total += cut[i];
    if (d <= main_half) main += cut[i];
  }
  double side = total - main;
  if (side <= total * 1e-12) return -120.0; // sentinel floor
  return linear_to_db(side / main);
}

namespace qualdetail {

// Synthetic separable sinc chip used to calibrate the K_TIMES_RES policy.
inline IRFChip synthetic_sinc_chip(int chip_size = 64, int oversample = 32,
                                   double null_spacing_px = 3.0) {
  Array2D<std::complex<float>> img(chip_size, chip_size);
  int c = chip_size / 2;
  for (int r = 0; r < chip_size; ++r)
    for (int k = 0; k < chip_size; ++k) {
      double v = sinc((r - c) / null_spacing_px) * sinc((k - c) / null_spacing_px);
      img(r, k) = std::complex<float>(static_cast<float>(v), 0.0f);
    }
  return extract_irf_from_image(img, 1.0, 1.0, c, c, chip_size, oversample);
}

} // namespace qualdetail

inline double islr_mainlobe_k() {
  static std::once_flag flag;
  static double k_cal = 0.5;
  std::call_once(flag, [] {
    IRFChip chip = qualdetail::synthetic_sinc_chip();
    double lo = 0.3, hi = 0.9;
    for (int i = 0; i < 40; ++i) {
      double mid = 0.5 * (lo + hi);
      double islr = measure_islr(chip, IrfAxis::kRange, MainlobePolicy::kKTimesRes, mid);
      // Growing the mainlobe lowers the ISLR.
      if (islr > -5.03)
        lo = mid;
      else
        hi = mid;
    }
    k_cal = 0.5 * (lo + hi);
  });
  return k_cal;
}

inline IRFReport measure_irf(const IRFChip& chip) {
  IRFReport rep;
  rep.pslr_range_db = measure_pslr(chip, IrfAxis::kRange);
  rep.pslr_azimuth_db = measure_pslr(chip, IrfAxis::kAzimuth);
  rep.islr_range_db = measure_islr(chip, IrfAxis::kRange);
  rep.islr_azimuth_db = measure_islr(chip, IrfAxis::kAzimuth);
  rep.resolution_range_m = measure_resolution(chip, IrfAxis::kRange);
  rep.resolution_azimuth_m = measure_resolution(chip, IrfAxis::kAzimuth);
  rep.peak_row = chip.source_peak_row;
  rep.peak_col = chip.source_peak_col;
  rep.peak_power = chip.peak_power;
  return rep;
}

struct MetricStats {
  double mean = 0.0;
  double std = 0.0;
};

struct AggregateReport {
  MetricStats pslr_range, pslr_azimuth;
  MetricStats islr_range, islr_azimuth;
  MetricStats resolution_range, resolution_azimuth;
  int count = 0;
};

inline MetricStats stats_of(const std::vector<double>& values) {
  MetricStats s;
  double n = static_cast<double>(values.size());
  for (double v : values) s.mean += v;
  s.mean /= n;
  double acc = 0.0;
  for (double v : values) acc += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(acc / (n - 1.0)); // unbiased
  return s;
}

inline AggregateReport aggregate_reports(const std::vector<IRFReport>& reports) {
  if (reports.size() < 2)
    throw Error(ErrorCode::kTooFew, "need at least two reports to aggregate");
  auto collect = [&](double IRFReport::*field) {
    std::vector<double> v;
    v.reserve(reports.size());
    for (const auto& r : reports) v.push_back(r.*field);
    return stats_of(v);
  };
  AggregateReport agg;
  agg.pslr_range = collect(&IRFReport::pslr_range_db);
  agg.pslr_azimuth = collect(&IRFReport::pslr_azimuth_db);
  agg.islr_range = collect(&IRFReport::islr_range_db);
  agg.islr_azimuth = collect(&IRFReport::islr_azimuth_db);
  agg.resolution_range = collect(&IRFReport::resolution_range_m);
  agg.resolution_azimuth = collect(&IRFReport::resolution_azimuth_m);
  agg.count = static_cast<int>(reports.size());
  return agg;
}

// Integrated energy of the response inside a +/- span_cells box around the
// chip center, with the background estimated from the surrounding annulus
// and removed. Returns energy in original-pixel units (sum |z|^2 per pixel).
struct ChipEnergy {
  double energy = 0.0;     // background-subtracted, original-pixel units
  double background = 0.0; // mean background power per original pixel
  double peak_power = 0.0;
};

inline ChipEnergy integrated_chip_energy(const IRFChip& chip,
                                         double span_resolution_cells = 8.0) {
  double res_r = measure_resolution(chip, IrfAxis::kRange) / chip.range_spacing;
  double res_a = measure_resolution(chip, IrfAxis::kAzimuth) / chip.azimuth_spacing;
  std::size_t center_r = chip.pixels.rows() / 2;
  std::size_t center_c = chip.pixels.cols() / 2;
  double half_r = span_resolution_cells * res_a * chip.oversample;
  double half_c = span_resolution_cells * res_r * chip.oversample;

  double box = 0.0, annulus = 0.0;
  std::size_t n_box = 0, n_annulus = 0;
  for (std::size_t r = 0; r < chip.pixels.rows(); ++r)
    for (std::size_t c = 0; c < chip.pixels.cols(); ++c) {
      double dr = std::abs(static_cast<double>(r) - static_cast<double>(center_r));
      double dc = std::abs(static_cast<double>(c) - static_cast<double>(center_c));
      double p = std::norm(chip.pixels(r, c));
      if (dr <= half_r && dc <= half_c) {
        box += p;
        ++n_box;
      } else if (dr > 1.15 * half_r && dc > 1.15 * half_c) {
        annulus += p;
        ++n_annulus;
      }
    }
  ChipEnergy e;
  e.peak_power = chip.peak_power;
  e.background = (n_annulus > 0) ? annulus / n_annulus : 0.0;
  double os2 = static_cast<double>(chip.oversample) * chip.oversample;
  e.energy = (box - e.background * n_box) / os2;
  return e;
}

// Standard deviation in dB of the recovered-RCS error across targets of one
// data take (constant offsets cancel).
inline double relative_radiometric_accuracy(const std::vector<IRFChip>& chips,
                                            const std::vector<double>& true_rcs) {
  if (chips.size() < 2 || chips.size() != true_rcs.size())
    throw Error(ErrorCode::kTooFew, "need at least two chips with matching RCS");
  std::vector<double> err_db;
  err_db.reserve(chips.size());
  for (std::size_t i = 0; i < chips.size(); ++i) {
    ChipEnergy e = integrated_chip_energy(chips[i]);
    err_db.push_back(linear_to_db(e.energy / true_rcs[i]));
  }
  return stats_of(err_db).std;
}

} // namespace sar
