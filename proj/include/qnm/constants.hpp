#pragma once

// CODATA 2018 values, SI units.

namespace qnm::constants {

inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double bohr_radius = 5.29177210903e-11;  // m
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg

}  // namespace qnm::constants
