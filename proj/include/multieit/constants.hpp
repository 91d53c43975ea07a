#pragma once

#include <numbers>

namespace multieit {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// CODATA 2018
inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double speed_of_light = 299792458.0; // m/s

// config files quote frequencies as value/2pi in MHz; internally everything
// is angular [rad/s]
inline constexpr double mhz_to_rad(double f_mhz) { return two_pi * 1e6 * f_mhz; }
inline constexpr double rad_to_mhz(double w) { return w / (two_pi * 1e6); }

} // namespace multieit
