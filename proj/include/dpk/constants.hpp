// Copyright 2026 The dpk Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPK_CONSTANTS_HPP
#define DPK_CONSTANTS_HPP

/// @file constants.hpp
/// The single table of physical constants (CODATA 2018) and unit conversions.
/// Every module converts through these values; nothing else in the tree
/// hard-codes a physical constant.

#include <numbers>

namespace dpk::constants {

inline constexpr double pi = std::numbers::pi;

// SI, CODATA 2018 (exact where the SI defines them).
inline constexpr double planck = 6.62607015e-34;                     // J s
inline constexpr double hbar = planck / (2.0 * pi);                  // J s
inline constexpr double elementary_charge = 1.602176634e-19;         // C
inline constexpr double speed_of_light = 299792458.0;                // m/s
inline constexpr double vacuum_permittivity = 8.8541878128e-12;      // F/m
inline constexpr double vacuum_permeability = 1.25663706212e-6;      // N/A^2
inline constexpr double bohr_magneton = 9.2740100783e-24;            // J/T
inline constexpr double nuclear_magneton = 5.0507837461e-27;         // J/T
inline constexpr double electron_g = 2.00231930436256;               // |g_e|
inline constexpr double boltzmann = 1.380649e-23;                    // J/K
inline constexpr double atomic_mass_unit = 1.66053906660e-27;        // kg
inline constexpr double bohr_radius = 5.29177210903e-11;             // m

// Unit conversions.
inline constexpr double ev = elementary_charge;                      // J per eV
inline constexpr double mev = 1e-3 * elementary_charge;              // J per meV
inline constexpr double angstrom = 1e-10;                            // m per Å
inline constexpr double debye = 3.33564e-30;                         // C m per D
inline constexpr double mhz = 1e6;                                   // Hz per MHz
inline constexpr double millitesla = 1e-3;                           // T per mT
inline constexpr double boltzmann_mev = boltzmann / mev;             // meV/K

/// Dipole moment of one elementary charge displaced by one Ångström, in Debye.
inline constexpr double e_angstrom_in_debye = elementary_charge * angstrom / debye;

/// (mu0/4pi)(g_e mu_B)^2 / h, expressed in MHz·Å^3. Divided by r^3 in Å this
/// is the electron-electron point-dipole coupling in MHz (≈52.04 MHz at 1 nm).
inline constexpr double electron_dipolar_mhz_a3 =
    vacuum_permeability / (4.0 * pi) * (electron_g * bohr_magneton) *
    (electron_g * bohr_magneton) / planck / mhz / (angstrom * angstrom * angstrom);

/// (mu0/4pi) g_e mu_B mu_N / h in MHz·Å^3; multiply by the nuclear g-factor.
inline constexpr double electron_nuclear_dipolar_mhz_a3 =
    vacuum_permeability / (4.0 * pi) * electron_g * bohr_magneton *
    nuclear_magneton / planck / mhz / (angstrom * angstrom * angstrom);

/// g_e mu_B / h in MHz per mT.
inline constexpr double electron_zeeman_mhz_per_mt =
    electron_g * bohr_magneton * millitesla / planck / mhz;

}  // namespace dpk::constants

#endif  // DPK_CONSTANTS_HPP
