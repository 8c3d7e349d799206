#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sar/focus.hpp"
#include "sar/quality.hpp"

using namespace sar;

namespace {

CollectionPlan base_plan(double bandwidth, double take_seconds) {
  CollectionPlan plan;
  plan.geom.center_incidence_deg = 25.0;
  plan.chirp.bandwidth = bandwidth;
  plan.chirp.sample_rate = 1.2 * bandwidth;
  plan.chirp.pulse_duration = 2e-6;
  plan.prf = 4500.0;
  plan.start_time = 0.0;
  plan.stop_time = take_seconds;
  plan.seed = 11;
  point_boresight_at_center(plan);
  return plan;
}

struct Scene {
  CollectionPlan plan;
  std::vector<PointTarget> targets;
  RawDataMatrix raw;
  std::vector<ZeroDopplerSolution> zd;
};

// Shared 40 MHz two-target stripmap scene (simulated once).
const Scene& shared_scene() {
  static Scene scene = [] {
    Scene s;
    s.plan = base_plan(40e6, 1.2);
    s.targets = {{place_target(s.plan, 0.0, 0.0), 200.0, 0.5},
                 {place_target(s.plan, 120.0, 90.0), 200.0, -0.9}};
    auto_range_window(s.plan, s.targets);
    s.raw = simulate_raw(s.targets, s.plan);
    for (const auto& t : s.targets)
      s.zd.push_back(zero_doppler_solve(s.plan.geom.orbit, t.position,
                                        s.plan.start_time, s.plan.stop_time,
                                        s.plan.ellipsoid));
    return s;
  }();
  return scene;
}

struct PeakLocation {
  double azimuth_time;
  double slant_range;
  double peak_power;
  double phase;
};

PeakLocation locate_peak(const FocusedImage& img, double t_hint, double r_hint) {
  int row = static_cast<int>(std::lround((t_hint - img.azimuth_time_start) /
                                         img.azimuth_time_step));
  int col = static_cast<int>(std::lround((r_hint - img.slant_range_start) /
                                         img.slant_range_step));
  IRFChip chip = extract_irf_from_image(img.pixels, 1.0, 1.0, row, col, 32, 16);
  PeakLocation loc;
  loc.azimuth_time = img.azimuth_time_start + chip.source_peak_row * img.azimuth_time_step;
  loc.slant_range = img.slant_range_start + chip.source_peak_col * img.slant_range_step;
  loc.peak_power = chip.peak_power;
  std::size_t c = chip.pixels.rows() / 2;
  loc.phase = std::arg(chip.pixels(c, c));
  return loc;
}

} // namespace

TEST_CASE("focus_range_doppler: point targets land on their zero-Doppler coordinates") {
  const Scene& s = shared_scene();
  FocusConfig cfg;
  FocusedImage img = focus_range_doppler(s.raw, cfg);

  for (std::size_t k = 0; k < s.targets.size(); ++k) {
    PeakLocation loc = locate_peak(img, s.zd[k].azimuth_time, s.zd[k].slant_range);
    CHECK(std::abs(loc.azimuth_time - s.zd[k].azimuth_time) <= 0.5 / s.plan.prf);
    CHECK(std::abs(loc.slant_range - s.zd[k].slant_range) <=
          0.5 * img.slant_range_step);
  }
}

TEST_CASE("focus_range_doppler: all-zero raw focuses to an all-zero image") {
  CollectionPlan plan = base_plan(40e6, 0.8);
  auto_range_window(plan, {});
  plan.range_samples = 256;
  RawDataMatrix raw = simulate_raw({}, plan);
  FocusedImage img = focus_range_doppler(raw, FocusConfig{});
  double energy = 0.0;
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    energy += std::norm(img.pixels.data()[i]);
  CHECK(energy == 0.0);
}

TEST_CASE("focus_range_doppler: spotlight input is routed away") {
  const Scene& s = shared_scene();
  RawDataMatrix raw = s.raw;
  raw.plan.geom.mode = ImagingMode::kSpotlight;
  raw.plan.geom.center_incidence_deg = 25.0;
  try {
    focus_range_doppler(raw, FocusConfig{});
    FAIL("expected ModeUnsupported");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kModeUnsupported);
  }
}

TEST_CASE("FocusConfig: doppler and band limits are enforced") {
  const Scene& s = shared_scene();
  FocusConfig cfg;
  cfg.processed_doppler_bandwidth = 3100.0;
  RawDataMatrix raw = s.raw;
  raw.plan.prf = 3000.0; // 3100 > 0.9 * 3000
  CHECK_THROWS_AS(focus_range_doppler(raw, cfg), Error);

  FocusConfig bad = FocusConfig{};
  bad.processed_doppler_bandwidth = 2000.0; // outside [2700, 3100]
  CHECK_THROWS_AS(focus_range_doppler(s.raw, bad), Error);
  bad = FocusConfig{};
  bad.rcmc_kernel_taps = 5;
  CHECK_THROWS_AS(focus_range_doppler(s.raw, bad), Error);
}

TEST_CASE("focus_backprojection: peak within one grid cell of the oracle") {
  const Scene& s = shared_scene();
  FocusConfig cfg;
  ImageGrid grid = chip_grid_around(s.raw, s.targets[0].position, 48, 48);
  FocusedImage img = focus_backprojection(s.raw, cfg, grid);

  PeakLocation loc = locate_peak(img, s.zd[0].azimuth_time, s.zd[0].slant_range);
  CHECK(std::abs(loc.azimuth_time - s.zd[0].azimuth_time) <= img.azimuth_time_step);
  CHECK(std::abs(loc.slant_range - s.zd[0].slant_range) <= img.slant_range_step);
}

TEST_CASE("range-Doppler and back-projection agree on position and power") {
  const Scene& s = shared_scene();
  FocusConfig cfg;
  FocusedImage rd = focus_range_doppler(s.raw, cfg);
  ImageGrid grid = chip_grid_around(s.raw, s.targets[0].position, 48, 48);
  FocusedImage bp = focus_backprojection(s.raw, cfg, grid);

  PeakLocation prd = locate_peak(rd, s.zd[0].azimuth_time, s.zd[0].slant_range);
  PeakLocation pbp = locate_peak(bp, s.zd[0].azimuth_time, s.zd[0].slant_range);
  CHECK(std::abs(prd.azimuth_time - pbp.azimuth_time) <= rd.azimuth_time_step);
  CHECK(std::abs(prd.slant_range - pbp.slant_range) <= rd.slant_range_step);
  double power_ratio_db = linear_to_db(prd.peak_power / pbp.peak_power);
  CHECK(std::abs(power_ratio_db) <= 0.3);
}

TEST_CASE("range-Doppler and back-projection peak phases agree within 10 deg") {
  // Two targets with different intrinsic phases: the difference between the
  // two peaks removes any per-image processing constant.
  const Scene& s = shared_scene();
  FocusConfig cfg;
  FocusedImage rd = focus_range_doppler(s.raw, cfg);
  ImageGrid g0 = chip_grid_around(s.raw, s.targets[0].position, 48, 48);
  ImageGrid g1 = chip_grid_around(s.raw, s.targets[1].position, 48, 48);
  FocusedImage bp0 = focus_backprojection(s.raw, cfg, g0);
  FocusedImage bp1 = focus_backprojection(s.raw, cfg, g1);

  double rd_diff = locate_peak(rd, s.zd[0].azimuth_time, s.zd[0].slant_range).phase -
                   locate_peak(rd, s.zd[1].azimuth_time, s.zd[1].slant_range).phase;
  double bp_diff = locate_peak(bp0, s.zd[0].azimuth_time, s.zd[0].slant_range).phase -
                   locate_peak(bp1, s.zd[1].azimuth_time, s.zd[1].slant_range).phase;
  double delta = std::remainder(rd_diff - bp_diff, 2.0 * kPi) * kRadToDeg;
  CHECK(std::abs(delta) <= 10.0);
}

TEST_CASE("focus: two targets 10 m apart in slant range resolve at 300 MHz") {
  CollectionPlan plan = base_plan(300e6, 1.1);
  plan.chirp.pulse_duration = 1.5e-6;
  // Ground offsets chosen so the slant ranges differ by ~10 m.
  double dg = 10.0 / std::sin(plan.geom.center_incidence_deg * kDegToRad);
  std::vector<PointTarget> targets = {{place_target(plan, 0.0, 0.0), 120.0, 0.0},
                                      {place_target(plan, 0.0, dg), 120.0, 0.0}};
  auto_range_window(plan, targets);
  RawDataMatrix raw = simulate_raw(targets, plan);
  FocusedImage img = focus_range_doppler(raw, FocusConfig{});

  auto zd0 = zero_doppler_solve(plan.geom.orbit, targets[0].position, 0.0,
                                plan.stop_time, plan.ellipsoid);
  auto zd1 = zero_doppler_solve(plan.geom.orbit, targets[1].position, 0.0,
                                plan.stop_time, plan.ellipsoid);
  int row = static_cast<int>(std::lround((zd0.azimuth_time - img.azimuth_time_start) /
                                         img.azimuth_time_step));
  int c0 = static_cast<int>(std::lround((zd0.slant_range - img.slant_range_start) /
                                        img.slant_range_step));
  int c1 = static_cast<int>(std::lround((zd1.slant_range - img.slant_range_start) /
                                        img.slant_range_step));
  REQUIRE(std::abs(c1 - c0) > 10);

  auto power = [&](int c) {
    return static_cast<double>(std::norm(img.pixels(row, c)));
  };
  double p0 = 0.0, p1 = 0.0;
  for (int d = -2; d <= 2; ++d) {
    p0 = std::max(p0, power(c0 + d));
    p1 = std::max(p1, power(c1 + d));
  }
  double valley = 1e300;
  for (int c = c0 + 3; c <= c1 - 3; ++c) valley = std::min(valley, power(c));
  CHECK(valley < 0.5 * std::min(p0, p1));
}

TEST_CASE("focus: point-target chip energy is invariant across azimuth position") {
  const Scene& s = shared_scene();
  FocusedImage img = focus_range_doppler(s.raw, FocusConfig{});
  double spacing_az = img.ground_velocity / s.plan.prf;

  std::vector<double> energies;
  for (std::size_t k = 0; k < s.targets.size(); ++k) {
    int row = static_cast<int>(std::lround((s.zd[k].azimuth_time - img.azimuth_time_start) /
                                           img.azimuth_time_step));
    int col = static_cast<int>(std::lround((s.zd[k].slant_range - img.slant_range_start) /
                                           img.slant_range_step));
    IRFChip chip = extract_irf_from_image(img.pixels, spacing_az,
                                          img.slant_range_step, row, col, 48, 16);
    energies.push_back(integrated_chip_energy(chip, 6.0).energy);
  }
  CHECK(std::abs(linear_to_db(energies[0] / energies[1])) <= 0.2);
}

TEST_CASE("focus: reducing processed bandwidth broadens azimuth monotonically") {
  const Scene& s = shared_scene();
  double prev_width = 0.0;
  for (double bw : {3100.0, 2900.0, 2700.0}) {
    FocusConfig cfg;
    cfg.processed_doppler_bandwidth = bw;
    FocusedImage img = focus_range_doppler(s.raw, cfg);
    int row = static_cast<int>(std::lround((s.zd[0].azimuth_time - img.azimuth_time_start) /
                                           img.azimuth_time_step));
    int col = static_cast<int>(std::lround((s.zd[0].slant_range - img.slant_range_start) /
                                           img.slant_range_step));
    double spacing_az = img.ground_velocity / s.plan.prf;
    IRFChip chip = extract_irf_from_image(img.pixels, spacing_az,
                                          img.slant_range_step, row, col, 32, 16);
    double width = measure_resolution(chip, IrfAxis::kAzimuth);
    CHECK(width > prev_width);
    prev_width = width;
  }
}

TEST_CASE("stripmap_azimuth_resolution: band values and antenna floor") {
  FocusConfig cfg;
  cfg.processed_doppler_bandwidth = 2700.0;
  double res = stripmap_azimuth_resolution(cfg, 6900.0);
  CHECK(res > 2.3);
  CHECK(res < 2.6);

  cfg.processed_doppler_bandwidth = 1e9; // clamps at the theoretical limit
  CHECK(stripmap_azimuth_resolution(cfg, 6900.0) == Catch::Approx(1.6));
}

TEST_CASE("focus_backprojection: grid outside the collection is rejected") {
  const Scene& s = shared_scene();
  ImageGrid grid = chip_grid_around(s.raw, s.targets[0].position, 32, 32);
  grid.azimuth_time_start = s.plan.stop_time + 1.0;
  CHECK_THROWS_AS(focus_backprojection(s.raw, FocusConfig{}, grid), Error);

  ImageGrid far = chip_grid_around(s.raw, s.targets[0].position, 32, 32);
  far.slant_range_start += 5e4; // beyond the receive window
  CHECK_THROWS_AS(focus_backprojection(s.raw, FocusConfig{}, far), Error);
}
