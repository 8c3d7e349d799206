#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sar/geometry.hpp"
#include "sar/prng.hpp"

using namespace sar;

namespace {

EarthEllipsoid sphere(double radius, double rotation = 0.0) {
  EarthEllipsoid e;
  e.semi_major_axis = radius;
  e.flattening = 0.0;
  e.rotation_rate = rotation;
  return e;
}

OrbitModel nominal_orbit() {
  OrbitModel o;
  o.height_at_equator = 570e3;
  o.inclination_deg = 97.69;
  return o;
}

// Brute-force zero-Doppler oracle: 1 ms scan followed by bisection on the
// line-of-sight velocity projection.
double brute_force_zero_doppler(const OrbitModel& orbit, const Vec3& target,
                                double t0, double t1,
                                const EarthEllipsoid& ellipsoid) {
  auto g = [&](double t) {
    StateVector s = propagate_orbit(orbit, t, ellipsoid);
    return dot(s.velocity, target - s.position);
  };
  double prev_t = t0, prev_g = g(t0);
  double lo = t0, hi = t1;
  bool found = false;
  for (double t = t0 + 1e-3; t <= t1 + 1e-12; t += 1e-3) {
    double gi = g(t);
    if ((prev_g < 0.0) != (gi < 0.0)) {
      lo = prev_t;
      hi = t;
      found = true;
      break;
    }
    prev_t = t;
    prev_g = gi;
  }
  REQUIRE(found);
  double g_lo = g(lo);
  for (int i = 0; i < 80; ++i) {
    double mid = 0.5 * (lo + hi);
    double gm = g(mid);
    if ((gm < 0.0) == (g_lo < 0.0)) {
      lo = mid;
      g_lo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("propagate_orbit: epoch state sits on the ascending node") {
  OrbitModel orbit = nominal_orbit();
  orbit.ascending_node = 0.7;
  StateVector s = propagate_orbit(orbit, 0.0);
  double r = norm(s.position);
  CHECK(r == Catch::Approx(6948137.0).epsilon(0.005));
  CHECK(std::abs(s.position.z) < 1e-6 * r);
  double lon = std::atan2(s.position.y, s.position.x);
  CHECK(lon == Catch::Approx(0.7).margin(1e-9));
}

TEST_CASE("propagate_orbit: inertial speed equals sqrt(mu/r)") {
  OrbitModel orbit = nominal_orbit();
  double r = orbit.radius();
  double expected = std::sqrt(kEarthGm / r);
  CHECK(expected == Catch::Approx(7574.0).epsilon(0.001));
  for (double t : {-213.0, 0.0, 17.5, 2400.0}) {
    StateVector s = propagate_orbit(orbit, t);
    CHECK(inertial_speed(s) == Catch::Approx(expected).epsilon(1e-9));
    // ECEF speed differs only by the transport term.
    CHECK(norm(s.velocity) == Catch::Approx(expected).epsilon(0.02));
    CHECK(norm(s.position) == Catch::Approx(r).epsilon(1e-9));
  }
}

TEST_CASE("propagate_orbit: polar orbit over a non-rotating earth tracks a meridian") {
  OrbitModel orbit = nominal_orbit();
  orbit.inclination_deg = 90.0;
  orbit.ascending_node = 0.3;
  EarthEllipsoid still = sphere(kWgs84SemiMajorAxis);
  for (double t : {10.0, 100.0, 300.0, 900.0}) {
    StateVector s = propagate_orbit(orbit, t, still);
    double rho = std::hypot(s.position.x, s.position.y);
    if (rho < 1e3) continue; // at the pole longitude is undefined
    double lon = std::atan2(s.position.y, s.position.x);
    double diff = std::remainder(lon - 0.3, kPi);
    CHECK(std::abs(diff) < 1e-9);
  }
}

TEST_CASE("zero_doppler_solve: target constructed broadside is recovered") {
  OrbitModel orbit = nominal_orbit();
  double t0 = 37.25;
  StateVector s = propagate_orbit(orbit, t0);
  AcquisitionGeometry geom;
  geom.orbit = orbit;
  ZeroDopplerFrame frame(s, LookSide::kRight, 0.0, EarthEllipsoid{});
  Vec3 target = frame.surface_point(0.4);

  ZeroDopplerSolution sol = zero_doppler_solve(orbit, target, t0 - 5.0, t0 + 5.0);
  CHECK(sol.azimuth_time == Catch::Approx(t0).margin(1e-9));
  CHECK(sol.slant_range == Catch::Approx(norm(target - s.position)).margin(1e-6));
}

TEST_CASE("zero_doppler_solve: agrees with the brute-force oracle") {
  OrbitModel orbit = nominal_orbit();
  EarthEllipsoid wgs84;
  for (int i = 0; i < 25; ++i) {
    double t0 = 20.0 + 31.0 * uniform_double(42, 7, i);
    double gamma = 0.25 + 0.3 * uniform_double(42, 8, i);
    StateVector s = propagate_orbit(orbit, t0, wgs84);
    ZeroDopplerFrame frame(s, LookSide::kRight, 0.0, wgs84);
    Vec3 target = frame.surface_point(gamma);
    // Push the target off the exact broadside plane.
    Vec3 v_hat = normalized(s.velocity);
    target = target + v_hat * (400.0 * (uniform_double(42, 9, i) - 0.5));

    ZeroDopplerSolution sol = zero_doppler_solve(orbit, target, t0 - 4.0, t0 + 4.0, wgs84);
    double oracle = brute_force_zero_doppler(orbit, target, t0 - 4.0, t0 + 4.0, wgs84);
    CHECK(std::abs(sol.azimuth_time - oracle) < 1e-6);

    StateVector at = propagate_orbit(orbit, sol.azimuth_time, wgs84);
    Vec3 d = target - at.position;
    CHECK(std::abs(dot(at.velocity, d)) <= norm(at.velocity) * norm(d) * 1e-12);
  }
}

TEST_CASE("zero_doppler_solve: window reparametrization does not move the root") {
  OrbitModel orbit = nominal_orbit();
  double t0 = 64.0;
  StateVector s = propagate_orbit(orbit, t0);
  ZeroDopplerFrame frame(s, LookSide::kLeft, 0.0, EarthEllipsoid{});
  Vec3 target = frame.surface_point(0.35);
  ZeroDopplerSolution a = zero_doppler_solve(orbit, target, t0 - 6.0, t0 + 6.0);
  ZeroDopplerSolution b = zero_doppler_solve(orbit, target, t0 - 1.5, t0 + 9.0);
  CHECK(a.azimuth_time == Catch::Approx(b.azimuth_time).margin(1e-9));
}

TEST_CASE("zero_doppler_solve: along-track displacement moves the time forward") {
  OrbitModel orbit = nominal_orbit();
  double t0 = 12.0;
  StateVector s = propagate_orbit(orbit, t0);
  ZeroDopplerFrame frame(s, LookSide::kRight, 0.0, EarthEllipsoid{});
  Vec3 base = frame.surface_point(0.4);
  Vec3 v_hat = normalized(s.velocity);
  double prev = zero_doppler_solve(orbit, base, t0 - 4.0, t0 + 4.0).azimuth_time;
  for (double d : {50.0, 150.0, 400.0}) {
    double t = zero_doppler_solve(orbit, base + v_hat * d, t0 - 4.0, t0 + 4.0).azimuth_time;
    CHECK(t > prev);
    prev = t;
  }
}

TEST_CASE("zero_doppler_solve: error cases") {
  OrbitModel orbit = nominal_orbit();
  StateVector s = propagate_orbit(orbit, 100.0);
  ZeroDopplerFrame frame(s, LookSide::kRight, 0.0, EarthEllipsoid{});
  Vec3 target = frame.surface_point(0.4);
  CHECK_THROWS_AS(zero_doppler_solve(orbit, target, 130.0, 140.0), Error);
  // A window spanning nearly a full orbit sees two broadside crossings.
  double period = 2.0 * kPi / std::sqrt(kEarthGm / std::pow(orbit.radius(), 3));
  CHECK_THROWS_AS(zero_doppler_solve(orbit, target, 100.0 - 0.6 * period,
                                     100.0 + 0.6 * period),
                  Error);
}

TEST_CASE("incidence_angle: sensor at zenith sees zero incidence") {
  EarthEllipsoid e = sphere(6371e3);
  Vec3 target{6371e3, 0.0, 0.0};
  StateVector s;
  s.position = Vec3{6371e3 + 570e3, 0.0, 0.0};
  CHECK(incidence_angle_deg(s, target, e) == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("incidence_angle: matches the spherical closed form") {
  double a = 6371e3;
  EarthEllipsoid e = sphere(a);
  double rs = a + 570e3;
  StateVector s;
  s.position = Vec3{rs, 0.0, 0.0};
  for (double phi_deg : {0.5, 1.0, 2.0, 3.0}) {
    double phi = phi_deg * kDegToRad;
    Vec3 target{a * std::cos(phi), a * std::sin(phi), 0.0};
    double slant = norm(target - s.position);
    double expected =
        std::acos((rs * rs - a * a - slant * slant) / (2.0 * a * slant)) * kRadToDeg;
    CHECK(incidence_angle_deg(s, target, e) ==
          Catch::Approx(expected).margin(1e-9));
  }
}

TEST_CASE("incidence_angle: nominal mid-swath stripmap geometry") {
  OrbitModel orbit = nominal_orbit();
  StateVector s = propagate_orbit(orbit, 50.0);
  ZeroDopplerFrame frame(s, LookSide::kRight, 0.0, EarthEllipsoid{});
  // Mid-swath look angle for a 570 km orbit stripmap collection.
  Vec3 target = frame.surface_point(20.0 * kDegToRad);
  double inc = incidence_angle_deg(s, target, EarthEllipsoid{});
  CHECK(inc >= 10.0);
  CHECK(inc <= 30.0);
}

TEST_CASE("incidence_angle: degenerate geometry is rejected") {
  EarthEllipsoid e = sphere(6371e3);
  Vec3 target{6371e3, 0.0, 0.0};
  StateVector s;
  s.position = Vec3{-(6371e3 + 570e3), 0.0, 0.0}; // below the target horizon
  CHECK_THROWS_AS(incidence_angle_deg(s, target, e), Error);
}

TEST_CASE("slant_to_ground: nadir range maps to zero ground range") {
  EarthEllipsoid flat = sphere(1e9);
  OrbitModel orbit;
  orbit.height_at_equator = 5000.0;
  StateVector s = propagate_orbit(orbit, 0.0, flat);
  AcquisitionGeometry geom;
  geom.orbit = orbit;
  geom.look_side = LookSide::kRight;
  double g = slant_to_ground(5000.0, geom, s, flat);
  CHECK(std::abs(g) < 1e-6);
}

TEST_CASE("slant_to_ground: Pythagorean oracle with curvature disabled") {
  // A 10^9 m sphere radius stands in for a flat earth at desk scale.
  EarthEllipsoid flat = sphere(1e9);
  OrbitModel orbit;
  orbit.height_at_equator = 5000.0;
  StateVector s = propagate_orbit(orbit, 0.0, flat);
  AcquisitionGeometry geom;
  geom.orbit = orbit;
  double h = 5000.0;
  for (double R : {5200.0, 7000.0, 9000.0, 12000.0, 15000.0}) {
    double g = slant_to_ground(R, geom, s, flat);
    double expected = std::sqrt(R * R - h * h);
    CHECK(g == Catch::Approx(expected).margin(1e-6));
  }
}

TEST_CASE("slant_to_ground / ground_to_slant: round trip across the swath") {
  OrbitModel orbit = nominal_orbit();
  EarthEllipsoid wgs84;
  StateVector s = propagate_orbit(orbit, 80.0, wgs84);
  AcquisitionGeometry geom;
  geom.orbit = orbit;
  geom.center_incidence_deg = 30.0;

  double prev_g = -1.0;
  for (double R : {630e3, 650e3, 660e3, 680e3, 700e3}) {
    double g = slant_to_ground(R, geom, s, wgs84);
    CHECK(g > prev_g); // strictly increasing
    prev_g = g;
    double back = ground_to_slant(g, geom, s, wgs84);
    CHECK(back == Catch::Approx(R).margin(1e-3));
  }
}

TEST_CASE("slant_to_ground: projection derivative equals 1/sin(incidence)") {
  OrbitModel orbit = nominal_orbit();
  EarthEllipsoid wgs84;
  StateVector s = propagate_orbit(orbit, 80.0, wgs84);
  AcquisitionGeometry geom;
  geom.orbit = orbit;
  Vec3 mid = surface_point_at_incidence(25.0, geom, s, wgs84);
  double R = norm(mid - s.position);
  double inc = incidence_angle_deg(s, mid, wgs84) * kDegToRad;

  double dr = 10.0;
  double g_plus = slant_to_ground(R + dr, geom, s, wgs84);
  double g_minus = slant_to_ground(R - dr, geom, s, wgs84);
  double derivative = (g_plus - g_minus) / (2.0 * dr);
  CHECK(derivative == Catch::Approx(1.0 / std::sin(inc)).epsilon(0.01));
}

TEST_CASE("incidence is continuous and monotonic across the swath") {
  OrbitModel orbit = nominal_orbit();
  EarthEllipsoid wgs84;
  StateVector s = propagate_orbit(orbit, 80.0, wgs84);
  ZeroDopplerFrame frame(s, LookSide::kRight, 0.0, wgs84);
  double prev = -1.0;
  for (double gamma = 0.05; gamma <= 0.45; gamma += 0.01) {
    double inc = incidence_angle_deg(s, frame.surface_point(gamma), wgs84);
    CHECK(inc > prev);
    CHECK(inc - prev < 5.0); // no jumps at a 0.01 rad step
    prev = inc;
  }
}

TEST_CASE("slant_to_ground: range sphere missing the surface is an error") {
  OrbitModel orbit = nominal_orbit();
  StateVector s = propagate_orbit(orbit, 0.0);
  AcquisitionGeometry geom;
  geom.orbit = orbit;
  CHECK_THROWS_AS(slant_to_ground(100e3, geom, s), Error); // shorter than nadir
}

TEST_CASE("surface_point_at_incidence hits the requested incidence") {
  OrbitModel orbit = nominal_orbit();
  EarthEllipsoid wgs84;
  StateVector s = propagate_orbit(orbit, 33.0, wgs84);
  AcquisitionGeometry geom;
  geom.orbit = orbit;
  for (double inc : {15.0, 25.0, 30.0}) {
    Vec3 p = surface_point_at_incidence(inc, geom, s, wgs84);
    CHECK(incidence_angle_deg(s, p, wgs84) == Catch::Approx(inc).margin(1e-6));
  }
}
