#pragma once

#include <numbers>

namespace beatscope {

/// Speed of light in cm/fs. Converts wavenumbers (cm^-1) to ordinary frequency (fs^-1).
inline constexpr double kSpeedOfLight = 2.99792458e-5;

/// Boltzmann constant expressed as a wavenumber per kelvin (cm^-1 / K).
inline constexpr double kBoltzmannWavenumber = 0.6950348;

inline constexpr double kPi = std::numbers::pi;

/// Vacuum wavelength in nm to wavenumber in cm^-1 (1e7 / nm). Throws NonPositive.
double nm_to_wavenumber(double nm);

/// Wavenumber in cm^-1 to vacuum wavelength in nm. Throws NonPositive.
double wavenumber_to_nm(double wavenumber_cm);

/// cm^-1 -> fs^-1
constexpr double wavenumber_to_frequency(double wavenumber_cm) { return kSpeedOfLight * wavenumber_cm; }

/// cm^-1 -> rad/fs
constexpr double wavenumber_to_angular(double wavenumber_cm) {
  return 2.0 * kPi * kSpeedOfLight * wavenumber_cm;
}

/// Oscillation period (fs) of a beat with the given spacing in cm^-1, and vice versa.
constexpr double wavenumber_to_period(double wavenumber_cm) { return 1.0 / (kSpeedOfLight * wavenumber_cm); }
constexpr double period_to_wavenumber(double period_fs) { return 1.0 / (kSpeedOfLight * period_fs); }

}  // namespace beatscope
