#pragma once

#include <numbers>

namespace thermalrabi {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * pi;

// Physical constants, SI units (CODATA 2018). h and k_B are exact by the
// 2019 SI redefinition; the atomic mass unit carries the CODATA uncertainty.
inline constexpr double planck_constant = 6.62607015e-34;      // J s
inline constexpr double hbar = planck_constant / two_pi;       // J s
inline constexpr double boltzmann_constant = 1.380649e-23;     // J / K
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg

// All frequencies are angular (rad/s) internally; ordinary frequencies in
// Hz appear only at user-facing boundaries.
inline constexpr double angular_from_hz(double f) { return two_pi * f; }
inline constexpr double hz_from_angular(double w) { return w / two_pi; }

}  // namespace thermalrabi
