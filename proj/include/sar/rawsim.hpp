#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "sar/constants.hpp"
#include "sar/error.hpp"
#include "sar/fft.hpp"
#include "sar/geometry.hpp"
#include "sar/mat2d.hpp"
#include "sar/parallel.hpp"
#include "sar/prng.hpp"
#include "sar/signal.hpp"

namespace sar {

struct PointTarget {
  Vec3 position;
  double rcs = 1.0;        // m^2
  double phase_offset = 0; // rad

  void validate() const {
    if (!(rcs > 0.0))
      throw Error(ErrorCode::kInvalidParams, "target RCS must be positive");
  }
};

struct AntennaModel {
  double length_azimuth = 3.2;    // m
  double height_elevation = 0.4;  // m
  double boresight_elevation_deg = 25.0; // look angle from in-plane nadir
  double peak_gain_db = 0.0;

  void validate() const {
    if (!(length_azimuth > 0.0) || !(height_elevation > 0.0))
      throw Error(ErrorCode::kInvalidParams, "antenna dimensions must be positive");
  }
};

// Separable two-way power pattern, sinc^2 one-way per axis and squared for
// two-way; unity at boresight.
inline double antenna_gain_two_way(const AntennaModel& antenna, double az_off,
                                   double el_off, double wavelength) {
  double ga = sinc(antenna.length_azimuth * std::sin(az_off) / wavelength);
  double ge = sinc(antenna.height_elevation * std::sin(el_off) / wavelength);
  double one_way_power = ga * ga * ge * ge;
  return one_way_power * one_way_power;
}

enum class SteeringMode { kFixed, kSpot };

struct SteeringLaw {
  SteeringMode mode = SteeringMode::kFixed;
  Vec3 spot_center; // SPOT only
};

struct CollectionPlan {
  AcquisitionGeometry geom;
  ChirpParams chirp;
  AntennaModel antenna;
  EarthEllipsoid ellipsoid;
  double prf = 4500.0;    // Hz
  double start_time = 0;  // s
  double stop_time = 1.0; // s
  SteeringLaw steering;
  double tx_power = 4000.0; // W
  double rx_gain_db = 0.0;
  double duty_cycle = 0.1;

  // Receive window: two-way delay of the first range sample and sample count.
  double range_window_start = 0.0;
  int range_samples = 0;

  // Digital amplitude scale of the uncalibrated simulation; annotated so the
  // calibration bookkeeping can reproduce the absolute level.
  double amplitude_scale = 1e12;

  uint64_t seed = 1;

  // Instrument imperfection knobs, all zero for an ideal collection.
  double rx_edge_taper_db = 0.0;  // receive-band amplitude droop at +/- B/2
  double gain_drift_db = 0.0;     // sinusoidal gain ripple amplitude over the take
  double gain_drift_cycles = 1.5;
  double gain_drift_phase = 0.0;

  int pulse_count() const {
    return static_cast<int>(std::floor((stop_time - start_time) * prf)) + 1;
  }
  double center_time() const { return 0.5 * (start_time + stop_time); }
  double pulse_time(int i) const { return start_time + i / prf; }

  void validate() const {
    geom.validate();
    chirp.validate();
    antenna.validate();
    if (prf < 2e3 || prf > 10e3)
      throw Error(ErrorCode::kInvalidParams, "PRF must be in [2, 10] kHz");
    if (!(duty_cycle > 0.0 && duty_cycle <= 0.5))
      throw Error(ErrorCode::kInvalidParams, "duty cycle must be in (0, 0.5]");
    if (!(stop_time > start_time))
      throw Error(ErrorCode::kInvalidParams, "empty collection interval");
    if (!(tx_power > 0.0))
      throw Error(ErrorCode::kInvalidParams, "transmit power must be positive");
    if (range_samples <= 0)
      throw Error(ErrorCode::kInvalidParams, "receive window not configured");
    if (chirp.pulse_duration * prf > duty_cycle + 1e-12)
      throw Error(ErrorCode::kInvalidParams, "pulse duration exceeds duty cycle");
  }
};

struct RawDataMatrix {
  Array2D<std::complex<float>> samples; // pulse x range sample
  std::vector<double> pulse_times;
  double range_window_start = 0.0; // two-way delay of sample 0, s
  CollectionPlan plan;
};

namespace simdetail {

// Pointing of a pulse: unit axes of the zero-Doppler frame plus the steered
// boresight azimuth angle.
struct PulseFrame {
  StateVector state;
  Vec3 v_hat, down, side;
  double boresight_az = 0.0;
};

inline PulseFrame make_pulse_frame(const CollectionPlan& plan, double t) {
  PulseFrame f;
  f.state = propagate_orbit(plan.geom.orbit, t, plan.ellipsoid);
  f.v_hat = normalized(f.state.velocity);
  Vec3 up = normalized(f.state.position);
  f.down = normalized(-(up - f.v_hat * dot(up, f.v_hat)));
  Vec3 right = normalized(cross(f.v_hat, up));
  f.side = (plan.geom.look_side == LookSide::kRight) ? right : -right;
  if (plan.steering.mode == SteeringMode::kSpot) {
    Vec3 d = normalized(plan.steering.spot_center - f.state.position);
    f.boresight_az = std::asin(dot(d, f.v_hat));
  }
  return f;
}

// Angles of a target direction in the pulse frame: azimuth out of the
// zero-Doppler plane (relative to the steered boresight) and elevation
// offset from the antenna boresight look angle.
struct TargetAngles {
  double az_off;
  double el_off;
  double range;
};

inline TargetAngles target_angles(const PulseFrame& f, const AntennaModel& antenna,
                                  const Vec3& target) {
  Vec3 d = target - f.state.position;
  double range = norm(d);
  Vec3 d_hat = d / range;
  double az = std::asin(dot(d_hat, f.v_hat));
  Vec3 in_plane = d_hat - f.v_hat * dot(d_hat, f.v_hat);
  double el = std::atan2(dot(in_plane, f.side), dot(in_plane, f.down));
  return {az - f.boresight_az, el - antenna.boresight_elevation_deg * kDegToRad,
          range};
}

// Two-way gain at the one-way -3 dB footprint edge.
inline constexpr double kFootprintGate = 0.251188643150958; // 10^(-0.6)

} // namespace simdetail

// Ground speed of the zero-Doppler footprint at scene center, from finite
// differences of the footprint position.
inline double footprint_ground_velocity(const CollectionPlan& plan) {
  double t0 = plan.center_time();
  double dt = 0.25;
  auto frame0 = simdetail::make_pulse_frame(plan, t0);
  auto frame1 = simdetail::make_pulse_frame(plan, t0 + dt);
  ZeroDopplerFrame z0(frame0.state, plan.geom.look_side, plan.geom.scene_height,
                      plan.ellipsoid);
  ZeroDopplerFrame z1(frame1.state, plan.geom.look_side, plan.geom.scene_height,
                      plan.ellipsoid);
  double gamma = plan.antenna.boresight_elevation_deg * kDegToRad;
  return norm(z1.surface_point(gamma) - z0.surface_point(gamma)) / dt;
}

// Scene-center surface point: broadside at the center of the take, at the
// configured center incidence.
inline Vec3 scene_center_point(const CollectionPlan& plan) {
  StateVector s = propagate_orbit(plan.geom.orbit, plan.center_time(), plan.ellipsoid);
  return surface_point_at_incidence(plan.geom.center_incidence_deg, plan.geom, s,
                                    plan.ellipsoid);
}

// Target placed relative to scene center: along-track meters (positive with
// the platform motion) and ground-range meters (positive away from nadir).
inline Vec3 place_target(const CollectionPlan& plan, double along_track_m,
                         double ground_offset_m) {
  double t_center = plan.center_time();
  StateVector s0 = propagate_orbit(plan.geom.orbit, t_center, plan.ellipsoid);
  ZeroDopplerFrame f0(s0, plan.geom.look_side, plan.geom.scene_height, plan.ellipsoid);
  Vec3 center = surface_point_at_incidence(plan.geom.center_incidence_deg,
                                           plan.geom, s0, plan.ellipsoid);
  double gamma_center = geodetail::look_angle_for_slant(f0, norm(center - s0.position));
  double arc_center = f0.arc_length(gamma_center);

  double v_g = footprint_ground_velocity(plan);
  double t = t_center + along_track_m / v_g;
  StateVector s = propagate_orbit(plan.geom.orbit, t, plan.ellipsoid);
  ZeroDopplerFrame f(s, plan.geom.look_side, plan.geom.scene_height, plan.ellipsoid);
  double gamma = geodetail::look_angle_for_arc(f, arc_center + ground_offset_m);
  return f.surface_point(gamma);
}

// Points the antenna elevation boresight at the surface point with the given
// incidence (scene center by default).
inline void point_boresight_at_incidence(CollectionPlan& plan,
                                         double incidence_deg) {
  StateVector s = propagate_orbit(plan.geom.orbit, plan.center_time(), plan.ellipsoid);
  ZeroDopplerFrame frame(s, plan.geom.look_side, plan.geom.scene_height, plan.ellipsoid);
  Vec3 p = surface_point_at_incidence(incidence_deg, plan.geom, s, plan.ellipsoid);
  double gamma = geodetail::look_angle_for_slant(frame, norm(p - s.position));
  plan.antenna.boresight_elevation_deg = gamma * kRadToDeg;
}

inline void point_boresight_at_center(CollectionPlan& plan) {
  point_boresight_at_incidence(plan, plan.geom.center_incidence_deg);
}

// Sizes the receive window so every listed target's echo fits over its
// illuminated dwell, with margin on both sides.
inline void auto_range_window(CollectionPlan& plan,
                              const std::vector<PointTarget>& targets,
                              double margin_m = 60.0) {
  double r_min = 1e18, r_max = 0.0;
  int n = plan.pulse_count();
  int coarse = std::max(1, n / 64);
  for (int i = 0; i < n; i += coarse) {
    auto frame = simdetail::make_pulse_frame(plan, plan.pulse_time(i));
    for (const auto& target : targets) {
      auto angles = simdetail::target_angles(frame, plan.antenna, target.position);
      double gain = antenna_gain_two_way(plan.antenna, angles.az_off, angles.el_off,
                                         plan.chirp.wavelength());
      if (gain < simdetail::kFootprintGate * 0.5) continue;
      r_min = std::min(r_min, angles.range);
      r_max = std::max(r_max, angles.range);
    }
  }
  if (r_max <= 0.0) {
    // No target inside the footprint; center the window on the scene.
    Vec3 c = scene_center_point(plan);
    StateVector s = propagate_orbit(plan.geom.orbit, plan.center_time(), plan.ellipsoid);
    r_min = r_max = norm(c - s.position);
    margin_m = std::max(margin_m, 200.0);
  }
  double t_lead = plan.chirp.pulse_duration / 2 + 2.0 * margin_m / kSpeedOfLight;
  plan.range_window_start = 2.0 * r_min / kSpeedOfLight - t_lead;
  double t_span = 2.0 * (r_max - r_min) / kSpeedOfLight + 2.0 * t_lead +
                  plan.chirp.pulse_duration;
  plan.range_samples = static_cast<int>(std::ceil(t_span * plan.chirp.sample_rate));
}

// Point-target raw echo synthesis: stop-and-hop, two-way R^4 power spreading,
// pattern-weighted, coherently summed over targets in list order (so
// superposition over disjoint target sets is bit-exact).
inline RawDataMatrix simulate_raw(const std::vector<PointTarget>& targets,
                                  const CollectionPlan& plan) {
  plan.validate();
  for (const auto& t : targets) t.validate();

  const int n_pulses = plan.pulse_count();
  const int n_range = plan.range_samples;
  const double fs = plan.chirp.sample_rate;
  const double rate = plan.chirp.chirp_rate();
  const double half_pulse = plan.chirp.pulse_duration / 2;
  const double wavelength = plan.chirp.wavelength();
  const double rx_gain = db_to_linear(plan.rx_gain_db);

  RawDataMatrix raw;
  raw.samples = Array2D<std::complex<float>>(n_pulses, n_range);
  raw.pulse_times.resize(n_pulses);
  raw.range_window_start = plan.range_window_start;
  raw.plan = plan;
  for (int i = 0; i < n_pulses; ++i) raw.pulse_times[i] = plan.pulse_time(i);

  std::vector<double> max_gain(targets.size(), 0.0);
  std::vector<char> window_violation(n_pulses, 0);
  std::vector<double> pulse_max_gain(targets.empty() ? 0 : n_pulses * targets.size(),
                                     0.0);

  double take = plan.stop_time - plan.start_time;
  par_for(n_pulses, [&](std::size_t ip) {
    double t = raw.pulse_times[ip];
    auto frame = simdetail::make_pulse_frame(plan, t);
    std::complex<float>* row = raw.samples.row(ip);

    double drift = 1.0;
    if (plan.gain_drift_db != 0.0) {
      double phase = 2.0 * kPi * plan.gain_drift_cycles * (t - plan.start_time) / take +
                     plan.gain_drift_phase;
      drift = std::pow(10.0, plan.gain_drift_db * std::sin(phase) / 20.0);
    }

    for (std::size_t k = 0; k < targets.size(); ++k) {
      auto angles = simdetail::target_angles(frame, plan.antenna, targets[k].position);
      double gain = antenna_gain_two_way(plan.antenna, angles.az_off, angles.el_off,
                                         wavelength);
      pulse_max_gain[ip * targets.size() + k] = gain;

      double r = angles.range;
      double tau = 2.0 * r / kSpeedOfLight;
      double first = (tau - half_pulse - plan.range_window_start) * fs;
      double last = (tau + half_pulse - plan.range_window_start) * fs;
      int m0 = std::max(0, static_cast<int>(std::ceil(first)));
      int m1 = std::min(n_range - 1, static_cast<int>(std::floor(last)));
      if (gain >= simdetail::kFootprintGate &&
          (first < -0.5 || last > n_range - 0.5))
        window_violation[ip] = 1;
      if (m1 < m0 || gain <= 0.0) continue;

      double amplitude = plan.amplitude_scale *
                         std::sqrt(plan.tx_power * rx_gain * targets[k].rcs * gain) /
                         (r * r) * drift;
      double echo_phase = -4.0 * kPi * r / wavelength + targets[k].phase_offset;
      std::complex<double> carrier{amplitude * std::cos(echo_phase),
                                   amplitude * std::sin(echo_phase)};
      for (int m = m0; m <= m1; ++m) {
        double t_rel = (plan.range_window_start + m / fs) - tau;
        double chirp_phase = kPi * rate * t_rel * t_rel;
        std::complex<double> v =
            carrier * std::complex<double>(std::cos(chirp_phase), std::sin(chirp_phase));
        row[m] += std::complex<float>(static_cast<float>(v.real()),
                                      static_cast<float>(v.imag()));
      }
    }

    if (plan.rx_edge_taper_db != 0.0) {
      // Receive-chain amplitude droop, quadratic in dB across the band.
      std::size_t nfft = next_pow2(n_range);
      std::vector<std::complex<double>> buf(nfft, 0.0);
      for (int m = 0; m < n_range; ++m) buf[m] = row[m];
      fft_inplace(buf);
      double half_band = plan.chirp.bandwidth / 2;
      for (std::size_t q = 0; q < nfft; ++q) {
        double f = fft_bin_frequency(q, nfft, fs);
        double x = f / half_band;
        buf[q] *= std::pow(10.0, -plan.rx_edge_taper_db * x * x / 20.0);
      }
      ifft_inplace(buf);
      for (int m = 0; m < n_range; ++m)
        row[m] = std::complex<float>(static_cast<float>(buf[m].real()),
                                     static_cast<float>(buf[m].imag()));
    }
  });

  for (std::size_t k = 0; k < targets.size(); ++k) {
    double g = 0.0;
    for (int ip = 0; ip < n_pulses; ++ip)
      g = std::max(g, pulse_max_gain[ip * targets.size() + k]);
    if (g < simdetail::kFootprintGate)
      throw Error(ErrorCode::kBeamMiss,
                  "target never enters the 3 dB footprint");
  }
  for (int ip = 0; ip < n_pulses; ++ip)
    if (window_violation[ip])
      throw Error(ErrorCode::kTargetOutOfWindow,
                  "echo extends outside the receive window");

  return raw;
}

// Adds reproducible complex white Gaussian noise of the given per-sample
// power. Streams are derived from (seed, pulse index), so the result is
// independent of evaluation order.
inline RawDataMatrix inject_noise(const RawDataMatrix& raw, double noise_power,
                                  uint64_t seed_override = 0) {
  if (noise_power < 0.0)
    throw Error(ErrorCode::kInvalidParams, "noise power must be non-negative");
  RawDataMatrix out = raw;
  if (noise_power == 0.0) return out;
  uint64_t seed = seed_override ? seed_override : raw.plan.seed;
  double sigma = std::sqrt(noise_power);
  par_for(out.samples.rows(), [&](std::size_t ip) {
    std::complex<float>* row = out.samples.row(ip);
    for (std::size_t m = 0; m < out.samples.cols(); ++m) {
      std::complex<double> z = complex_gaussian(seed, ip, m) * sigma;
      row[m] += std::complex<float>(static_cast<float>(z.real()),
                                    static_cast<float>(z.imag()));
    }
  });
  return out;
}

} // namespace sar
