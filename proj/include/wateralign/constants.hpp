#pragma once

#include <numbers>

namespace wateralign::constants {

// CODATA 2018. h, c and k_B are exact by definition of the SI.
inline constexpr double planck = 6.62607015e-34;          // J s
inline constexpr double hbar = planck / (2.0 * std::numbers::pi);
inline constexpr double speed_of_light = 299792458.0;      // m/s
inline constexpr double boltzmann = 1.380649e-23;         // J/K
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m

inline constexpr double speed_of_light_cm_per_s = speed_of_light * 1.0e2;
inline constexpr double speed_of_light_cm_per_ps = speed_of_light_cm_per_s * 1.0e-12;

// k_B / (h c): converts a temperature in K to a thermal energy in cm^-1.
inline constexpr double boltzmann_cm1_per_k = boltzmann / (planck * speed_of_light_cm_per_s);

// Angular frequency in rad/ps of a level at 1 cm^-1.
inline constexpr double omega_per_cm1 = 2.0 * std::numbers::pi * speed_of_light_cm_per_ps;

inline constexpr double angstrom3_to_m3 = 1.0e-30;
inline constexpr double w_per_cm2_to_w_per_m2 = 1.0e4;

}  // namespace wateralign::constants
