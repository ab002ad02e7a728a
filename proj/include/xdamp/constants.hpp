#pragma once

#include <numbers>

// CODATA 2018 values, SI units.
namespace xdamp::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double c = 299792458.0;                  // m/s
inline constexpr double hbar = 1.054571817e-34;           // J s
inline constexpr double k_boltzmann = 1.380649e-23;       // J/K
inline constexpr double alpha = 7.2973525693e-3;          // fine-structure constant
inline constexpr double bohr_radius = 5.29177210903e-11;  // m
inline constexpr double rydberg_frequency = 3.2898419602508e15;  // R_inf c [Hz]
inline constexpr double electron_mass = 9.1093837015e-31;        // kg
inline constexpr double electron_proton_mass_ratio = 1.0 / 1836.15267343;
inline constexpr double proton_g_factor = 5.5856946893;
inline constexpr double euler_gamma = std::numbers::egamma;

/// m_e c^2 / hbar [rad/s], the default high-frequency cutoff.
inline constexpr double electron_rest_frequency = electron_mass * c * c / hbar;

}  // namespace xdamp::constants
