#pragma once

#include <cmath>
#include <functional>
#include <utility>

#include "sar/constants.hpp"
#include "sar/error.hpp"
#include "sar/linalg.hpp"

namespace sar {

struct EarthEllipsoid {
  double semi_major_axis = kWgs84SemiMajorAxis;
  double flattening = kWgs84Flattening;
  double rotation_rate = kEarthRotationRate;

  double semi_minor_axis() const { return semi_major_axis * (1.0 - flattening); }

  void validate() const {
    if (!(semi_major_axis > 0.0))
      throw Error(ErrorCode::kInvalidParams, "ellipsoid semi-major axis must be positive");
    if (!(flattening >= 0.0 && flattening < 1.0))
      throw Error(ErrorCode::kInvalidParams, "ellipsoid flattening must be in [0, 1)");
  }
};

struct OrbitModel {
  double height_at_equator = 570e3; // m
  double inclination_deg = 97.69;
  double epoch = 0.0;               // s
  double ascending_node = 0.0;      // rad, inertial RAAN
  double phase = 0.0;               // rad, argument along orbit at epoch

  double radius(const EarthEllipsoid& ellipsoid = {}) const {
    return ellipsoid.semi_major_axis + height_at_equator;
  }

  void validate() const {
    if (!(height_at_equator > 0.0))
      throw Error(ErrorCode::kInvalidParams, "orbit height must be positive");
    if (!(inclination_deg >= 0.0 && inclination_deg <= 180.0))
      throw Error(ErrorCode::kInvalidParams, "inclination must be in [0, 180] deg");
  }
};

struct StateVector {
  double time = 0.0;
  Vec3 position; // ECEF, m
  Vec3 velocity; // ECEF, m/s
};

enum class LookSide { kLeft, kRight };
enum class ImagingMode { kStripmap, kSpotlight };

struct AcquisitionGeometry {
  OrbitModel orbit;
  LookSide look_side = LookSide::kRight;
  ImagingMode mode = ImagingMode::kStripmap;
  double center_incidence_deg = 30.0;
  double scene_height = 0.0; // m above ellipsoid, scene-averaged

  void validate() const {
    orbit.validate();
    if (mode == ImagingMode::kStripmap) {
      if (center_incidence_deg < 10.0 || center_incidence_deg > 30.0)
        throw Error(ErrorCode::kInvalidParams,
                    "stripmap incidence must be in [10, 30] deg");
    } else {
      if (center_incidence_deg < 20.0 || center_incidence_deg > 35.0)
        throw Error(ErrorCode::kInvalidParams,
                    "spotlight incidence must be in [20, 35] deg");
    }
  }
};

// Circular two-body motion in the inclined orbit plane, rotated into ECEF
// with the Earth spun by rotation_rate * t (zero Greenwich angle at t = 0).
inline StateVector propagate_orbit(const OrbitModel& orbit, double t,
                                   const EarthEllipsoid& ellipsoid = {}) {
  if (!std::isfinite(t))
    throw Error(ErrorCode::kInvalidParams, "propagation time must be finite");
  double r = orbit.radius(ellipsoid);
  double n = std::sqrt(kEarthGm / (r * r * r));
  double u = orbit.phase + n * (t - orbit.epoch);
  double inclination = orbit.inclination_deg * kDegToRad;

  Vec3 pos_plane{r * std::cos(u), r * std::sin(u), 0.0};
  Vec3 vel_plane{-r * n * std::sin(u), r * n * std::cos(u), 0.0};
  Vec3 pos_eci = rotate_z(rotate_x(pos_plane, inclination), orbit.ascending_node);
  Vec3 vel_eci = rotate_z(rotate_x(vel_plane, inclination), orbit.ascending_node);

  double spin = ellipsoid.rotation_rate * t;
  Vec3 pos_ecef = rotate_z(pos_eci, -spin);
  Vec3 omega{0.0, 0.0, ellipsoid.rotation_rate};
  Vec3 vel_ecef = rotate_z(vel_eci, -spin) - cross(omega, pos_ecef);

  return {t, pos_ecef, vel_ecef};
}

// Speed in the inertial frame; for the circular model this equals
// sqrt(mu / r) to machine precision.
inline double inertial_speed(const StateVector& state,
                             const EarthEllipsoid& ellipsoid = {}) {
  Vec3 omega{0.0, 0.0, ellipsoid.rotation_rate};
  return norm(state.velocity + cross(omega, state.position));
}

struct ZeroDopplerSolution {
  double azimuth_time = 0.0;
  double slant_range = 0.0;
};

// Time at which the sensor velocity is perpendicular to the line of sight.
// Bracketing scan + bisection, then Newton polish on dot(v, target - p).
inline ZeroDopplerSolution zero_doppler_solve(const OrbitModel& orbit,
                                              const Vec3& target,
                                              double window_begin,
                                              double window_end,
                                              const EarthEllipsoid& ellipsoid = {}) {
  if (!(window_end > window_begin))
    throw Error(ErrorCode::kInvalidParams, "empty zero-Doppler search window");

  auto g = [&](double t) {
    StateVector s = propagate_orbit(orbit, t, ellipsoid);
    return dot(s.velocity, target - s.position);
  };

  constexpr int kScanSteps = 256;
  double dt = (window_end - window_begin) / kScanSteps;
  double t_lo = 0.0, t_hi = 0.0;
  int crossings = 0;
  double prev_t = window_begin;
  double prev_g = g(prev_t);
  for (int i = 1; i <= kScanSteps; ++i) {
    double t = window_begin + i * dt;
    double gi = g(t);
    if (prev_g == 0.0 || (prev_g < 0.0) != (gi < 0.0)) {
      ++crossings;
      t_lo = prev_t;
      t_hi = t;
    }
    prev_t = t;
    prev_g = gi;
  }
  if (crossings == 0)
    throw Error(ErrorCode::kNoCrossing, "no broadside crossing in window");
  if (crossings > 1)
    throw Error(ErrorCode::kAmbiguous, "multiple broadside crossings in window");

  double g_lo = g(t_lo);
  while (t_hi - t_lo > 1e-6) {
    double tm = 0.5 * (t_lo + t_hi);
    double gm = g(tm);
    if ((gm < 0.0) == (g_lo < 0.0)) {
      t_lo = tm;
      g_lo = gm;
    } else {
      t_hi = tm;
    }
  }

  double t = 0.5 * (t_lo + t_hi);
  for (int iter = 0; iter < 12; ++iter) {
    StateVector s = propagate_orbit(orbit, t, ellipsoid);
    Vec3 d = target - s.position;
    double gt = dot(s.velocity, d);
    double scale = norm(s.velocity) * norm(d);
    if (std::abs(gt) <= scale * 1e-13) break;
    // g'(t) = dot(a, d) - |v|^2 with the acceleration taken numerically.
    const double h = 1e-3;
    Vec3 v_plus = propagate_orbit(orbit, t + h, ellipsoid).velocity;
    Vec3 v_minus = propagate_orbit(orbit, t - h, ellipsoid).velocity;
    Vec3 a = (v_plus - v_minus) / (2.0 * h);
    double dg = dot(a, d) - dot(s.velocity, s.velocity);
    if (dg == 0.0) break;
    t -= gt / dg;
  }

  StateVector s = propagate_orbit(orbit, t, ellipsoid);
  return {t, norm(target - s.position)};
}

// Angle between the outward ellipsoid normal at the target and the
// target-to-sensor direction, in degrees.
inline double incidence_angle_deg(const StateVector& state, const Vec3& target,
                                  const EarthEllipsoid& ellipsoid = {}) {
  double a = ellipsoid.semi_major_axis;
  double b = ellipsoid.semi_minor_axis();
  Vec3 grad{target.x / (a * a), target.y / (a * a), target.z / (b * b)};
  Vec3 n = normalized(grad);
  Vec3 to_sensor = state.position - target;
  double r = norm(to_sensor);
  if (r <= 0.0)
    throw Error(ErrorCode::kTargetAboveSensor, "sensor coincides with target");
  double c = dot(n, to_sensor) / r;
  if (c <= 0.0)
    throw Error(ErrorCode::kTargetAboveSensor,
                "target-to-sensor direction below local horizon");
  if (c > 1.0) c = 1.0;
  return std::acos(c) * kRadToDeg;
}

// Zero-Doppler plane frame at a sensor state: the plane through the sensor
// perpendicular to the velocity, with an in-plane "down" axis and an
// in-plane cross-track axis on the requested look side. Rays from the sensor
// are parameterized by the look angle from in-plane nadir.
class ZeroDopplerFrame {
 public:
  ZeroDopplerFrame(const StateVector& state, LookSide side, double scene_height,
                   const EarthEllipsoid& ellipsoid)
      : sensor_(state.position) {
    double ax = ellipsoid.semi_major_axis + scene_height;
    double bz = ellipsoid.semi_minor_axis() + scene_height;
    inv_ax2_ = 1.0 / (ax * ax);
    inv_bz2_ = 1.0 / (bz * bz);

    Vec3 v_hat = normalized(state.velocity);
    Vec3 up = normalized(state.position);
    Vec3 down_in_plane = -(up - v_hat * dot(up, v_hat));
    down_ = normalized(down_in_plane);
    Vec3 right = normalized(cross(v_hat, up));
    side_ = (side == LookSide::kRight) ? right : -right;
  }

  Vec3 direction(double look_angle) const {
    return down_ * std::cos(look_angle) + side_ * std::sin(look_angle);
  }

  // Distance along direction(look_angle) to the inflated-ellipsoid surface
  // (near intersection) and its derivative d(distance)/d(look_angle).
  // Throws NoIntersection when the ray misses the surface.
  std::pair<double, double> intersect(double look_angle) const {
    Vec3 d = direction(look_angle);
    Vec3 dprime = -down_ * std::sin(look_angle) + side_ * std::cos(look_angle);
    double A = quad(d, d);
    double B = quad(sensor_, d);
    double C = quad(sensor_, sensor_) - 1.0;
    double disc = B * B - A * C;
    if (disc <= 0.0)
      throw Error(ErrorCode::kNoIntersection, "range ray misses the surface");
    double sq = std::sqrt(disc);
    // Near root, written to avoid cancellation (B < 0 for a downward ray).
    double t = C / (-B + sq);
    double dA = 2.0 * quad(d, dprime);
    double dB = quad(sensor_, dprime);
    double denom = 2.0 * (A * t + B);
    double dt = -(dA * t * t + 2.0 * dB * t) / denom;
    return {t, dt};
  }

  Vec3 surface_point(double look_angle) const {
    auto [t, dt] = intersect(look_angle);
    (void)dt;
    return sensor_ + direction(look_angle) * t;
  }

  double slant_range(double look_angle) const {
    return intersect(look_angle).first;
  }

  // Arc length along the plane/surface intersection curve from the in-plane
  // nadir point to look_angle. Adaptive Simpson on sqrt(t'^2 + t^2), the
  // polar arc element around the sensor.
  double arc_length(double look_angle) const {
    auto integrand = [&](double g) {
      auto [t, dt] = intersect(g);
      return std::sqrt(dt * dt + t * t);
    };
    return adaptive_simpson(integrand, 0.0, look_angle, 1e-9);
  }

  double nadir_range() const { return slant_range(0.0); }

  const Vec3& sensor() const { return sensor_; }

 private:
  double quad(const Vec3& p, const Vec3& q) const {
    return p.x * q.x * inv_ax2_ + p.y * q.y * inv_ax2_ + p.z * q.z * inv_bz2_;
  }

  template <typename F>
  static double adaptive_simpson(const F& f, double a, double b, double rel_tol) {
    auto simpson = [&](double lo, double hi, double flo, double fmid, double fhi) {
      return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    };
    std::function<double(double, double, double, double, double, double, int)> rec =
        [&](double lo, double hi, double flo, double fmid, double fhi,
            double whole, int depth) -> double {
      double m = 0.5 * (lo + hi);
      double f_lm = f(0.5 * (lo + m));
      double f_rm = f(0.5 * (m + hi));
      double left = simpson(lo, m, flo, f_lm, fmid);
      double right = simpson(m, hi, fmid, f_rm, fhi);
      double err = left + right - whole;
      if (depth <= 0 || std::abs(err) <= 15.0 * rel_tol * std::abs(left + right))
        return left + right + err / 15.0;
      return rec(lo, m, flo, f_lm, fmid, left, depth - 1) +
             rec(m, hi, fmid, f_rm, fhi, right, depth - 1);
    };
    if (a == b) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return rec(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), 40);
  }

  Vec3 sensor_;
  Vec3 down_;
  Vec3 side_;
  double inv_ax2_ = 0.0;
  double inv_bz2_ = 0.0;
};

namespace geodetail {

// Look angle whose slant range equals the requested one; slant range is
// strictly increasing in look angle up to the horizon.
inline double look_angle_for_slant(const ZeroDopplerFrame& frame,
                                   double slant_range) {
  double nadir = frame.nadir_range();
  if (slant_range < nadir - 1e-6)
    throw Error(ErrorCode::kNoIntersection,
                "slant range shorter than nadir distance");
  if (slant_range <= nadir) return 0.0;

  auto range_at = [&](double g, double* out) {
    try {
      *out = frame.slant_range(g);
      return true;
    } catch (const Error&) {
      return false;
    }
  };

  // Expand toward the target range; track the first known miss so the
  // bracket can be pushed toward the horizon when needed.
  double lo = 0.0, hi = 0.2;
  double miss = -1.0;
  double r_hi = 0.0;
  while (true) {
    if (range_at(hi, &r_hi)) {
      if (r_hi >= slant_range) break;
      lo = hi;
      if (miss > 0.0) {
        hi = 0.5 * (hi + miss);
        if (miss - lo < 1e-13)
          throw Error(ErrorCode::kNoIntersection,
                      "slant range beyond the visible surface");
      } else {
        hi = std::min(hi * 1.5, kPi / 2);
        if (hi >= kPi / 2) miss = kPi / 2;
      }
    } else {
      miss = hi;
      hi = 0.5 * (lo + hi);
      if (miss - lo < 1e-13)
        throw Error(ErrorCode::kNoIntersection,
                    "slant range beyond the visible surface");
    }
  }

  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    double r = 0.0;
    if (!range_at(mid, &r)) {
      hi = mid;
      continue;
    }
    if (r < slant_range)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-14 || std::abs(r - slant_range) < 1e-9) break;
  }
  double g = 0.5 * (lo + hi);
  for (int k = 0; k < 4; ++k) {
    auto [t, dt] = frame.intersect(g);
    double err = t - slant_range;
    if (std::abs(err) < 1e-10 || dt <= 0.0) break;
    g -= err / dt;
  }
  return g;
}

// Look angle at which the surface arc length from the in-plane nadir point
// equals the requested ground range.
inline double look_angle_for_arc(const ZeroDopplerFrame& frame,
                                 double ground_range) {
  if (ground_range <= 0.0) return 0.0;
  double lo = 0.0, hi = 0.05;
  while (frame.arc_length(hi) < ground_range) {
    lo = hi;
    hi *= 1.5;
    if (hi > kPi / 2)
      throw Error(ErrorCode::kNoIntersection, "ground range beyond horizon");
  }
  for (int i = 0; i < 100; ++i) {
    double mid = 0.5 * (lo + hi);
    if (frame.arc_length(mid) < ground_range)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-14) break;
  }
  return 0.5 * (lo + hi);
}

} // namespace geodetail

// Ground range, measured as arc length along the (scene-height inflated)
// ellipsoid surface in the zero-Doppler plane, from the sub-satellite point
// to the range-sphere intersection on the look side.
inline double slant_to_ground(double slant_range, const AcquisitionGeometry& geom,
                              const StateVector& ref_state,
                              const EarthEllipsoid& ellipsoid = {}) {
  ZeroDopplerFrame frame(ref_state, geom.look_side, geom.scene_height, ellipsoid);
  double gamma = geodetail::look_angle_for_slant(frame, slant_range);
  return frame.arc_length(gamma);
}

inline double ground_to_slant(double ground_range, const AcquisitionGeometry& geom,
                              const StateVector& ref_state,
                              const EarthEllipsoid& ellipsoid = {}) {
  ZeroDopplerFrame frame(ref_state, geom.look_side, geom.scene_height, ellipsoid);
  if (ground_range <= 0.0) return frame.nadir_range();
  return frame.slant_range(geodetail::look_angle_for_arc(frame, ground_range));
}

// Surface point seen at the given slant range in the zero-Doppler plane.
inline Vec3 surface_point_at_slant(double slant_range,
                                   const AcquisitionGeometry& geom,
                                   const StateVector& ref_state,
                                   const EarthEllipsoid& ellipsoid = {}) {
  ZeroDopplerFrame frame(ref_state, geom.look_side, geom.scene_height, ellipsoid);
  double gamma = geodetail::look_angle_for_slant(frame, slant_range);
  return frame.surface_point(gamma);
}

// Surface point whose incidence angle matches the request, by bisection on
// the look angle (incidence is monotone across the swath).
inline Vec3 surface_point_at_incidence(double incidence_deg,
                                       const AcquisitionGeometry& geom,
                                       const StateVector& ref_state,
                                       const EarthEllipsoid& ellipsoid = {}) {
  ZeroDopplerFrame frame(ref_state, geom.look_side, geom.scene_height, ellipsoid);
  auto incidence_at = [&](double gamma) {
    try {
      Vec3 p = frame.surface_point(gamma);
      return incidence_angle_deg(ref_state, p, ellipsoid);
    } catch (const Error&) {
      return 90.0; // beyond horizon: treat as grazing
    }
  };
  double lo = 0.0, hi = 0.1;
  while (incidence_at(hi) < incidence_deg) {
    lo = hi;
    hi *= 1.4;
    if (hi > kPi / 2)
      throw Error(ErrorCode::kNoIntersection, "incidence beyond horizon");
  }
  for (int i = 0; i < 120; ++i) {
    double mid = 0.5 * (lo + hi);
    if (incidence_at(mid) < incidence_deg)
      lo = mid;
    else
      hi = mid;
  }
  return frame.surface_point(0.5 * (lo + hi));
}

} // namespace sar
