#ifndef FDLINK_CONSTANTS_HPP
#define FDLINK_CONSTANTS_HPP

#include <numbers>

namespace fdlink {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wave impedance of free space in ohms. Fixed, never configurable.
inline constexpr double kEta0Ohm = 376.730313668;

/// Speed of light in vacuum, m/s.
inline constexpr double kSpeedOfLight = 299792458.0;

inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Free-space wave number 2*pi/lambda.
inline constexpr double wave_number(double wavelength_m) {
  return kTwoPi / wavelength_m;
}

} // namespace fdlink

#endif
