#pragma once

#include <cmath>

namespace sar {

// Physical constants (SI units throughout; angles in radians unless a name
// says _deg).
inline constexpr double kSpeedOfLight = 299792458.0;          // m/s
inline constexpr double kEarthGm = 3.986004418e14;            // m^3/s^2
inline constexpr double kEarthRotationRate = 7.2921151467e-5; // rad/s

// WGS84 ellipsoid.
inline constexpr double kWgs84SemiMajorAxis = 6378137.0; // m
inline constexpr double kWgs84Flattening = 1.0 / 298.257223563;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;

// -3 dB full width of sinc(x) = sin(pi x)/(pi x), in units of the
// null-to-null half spacing. Used both by the impulse-response width
// bookkeeping and as the processor's uniform gate fraction of the nominal
// bandwidth, so that the measured -3 dB width of an unweighted response
// equals c/(2B) exactly.
inline constexpr double kSincHalfPowerWidth = 0.8858929413789287;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double amplitude_db(double x) { return 20.0 * std::log10(x); }

inline double sinc(double x) {
  if (std::abs(x) < 1e-9) {
    double px = kPi * x;
    return 1.0 - px * px / 6.0;
  }
  return std::sin(kPi * x) / (kPi * x);
}

} // namespace sar
