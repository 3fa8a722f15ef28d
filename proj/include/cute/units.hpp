#pragma once

// Physical constants (CODATA 2018 exact / recommended values) and the
// derived conversion factors used throughout the library. Energies are in eV,
// times in fs, coordinates in Å (physical mode) or mass-weighted natural units.

#include <numbers>

namespace cute::units {

inline constexpr double hbar_SI = 1.054571817e-34;       // J s
inline constexpr double electron_volt = 1.602176634e-19; // J
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg
inline constexpr double angstrom = 1e-10;                // m
inline constexpr double femtosecond = 1e-15;             // s

/// ħ in eV·fs.
inline constexpr double hbar_eV_fs = hbar_SI / electron_volt / femtosecond;

/// ħ² / (1 amu · 1 Å²) expressed in eV.
inline constexpr double kinetic_constant_eV =
    hbar_SI * hbar_SI / (atomic_mass_unit * angstrom * angstrom) / electron_volt;

inline constexpr double pi = std::numbers::pi;

} // namespace cute::units
