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

#ifndef DPK_LINESHAPE_HPP
#define DPK_LINESHAPE_HPP

/// @file lineshape.hpp
/// Huang-Rhys decomposition of a ground/excited geometry pair and the
/// photoluminescence lineshape from the generating function
///
///   G(t) = exp(S(t) − S(0)),  S(t) = Σ_k s_k [(n_k+1) e^(−iω_k t) + n_k e^(iω_k t)]
///   L(ε) = (1/2π) ∫ G(t) B(t) e^(iεt) dt,  E = E_zpl − ε
///
/// where B(t) is the zero-phonon-line broadening. Energies inside this module
/// are meV and times are ħ/meV; emitted spectra are on an eV axis in 1/eV.

#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dpk/ingest.hpp"

namespace dpk::lineshape {

struct HrMode {
  double energy_mev = 0.0;  // ħω_k
  double q = 0.0;           // mode projection, amu^(1/2)·Å
  double s = 0.0;           // partial Huang-Rhys factor
};

struct HuangRhysDecomposition {
  std::vector<HrMode> modes;
  double total = 0.0;  // S_tot = Σ s_k

  /// Builds a decomposition directly from (ħω in meV, s_k) pairs.
  static HuangRhysDecomposition from_factors(std::span<const std::pair<double, double>> modes);
  double max_energy_mev() const;
};

/// s = ω q² / 2ħ for ħω in meV and q in amu^(1/2)·Å, and its inverse.
double hr_factor(double energy_mev, double q);
double projection_for_hr(double energy_mev, double s);

/// Component 3a+i is √m_a · (R_excited − R_ground)_a,i with minimum-image
/// reduction in the ground-state lattice. Units amu^(1/2)·Å.
Eigen::VectorXd mass_weighted_displacement(const DefectConfiguration& ground,
                                           const DefectConfiguration& excited);

/// Projects a mass-weighted displacement onto every mode. Zero-frequency
/// modes carry s = 0 and must have |q| ≤ zero_mode_tolerance.
HuangRhysDecomposition partial_hr_factors(const Eigen::VectorXd& displacement,
                                          const PhononBasis& basis,
                                          double zero_mode_tolerance = 1e-6);

double debye_waller(const HuangRhysDecomposition& hr);

/// S(ħω) = Σ_k s_k g_σ(ħω − ħω_k) sampled at ħω = j·step, j = 0..n−1.
struct SpectralDensity {
  double step_mev = 0.0;
  double smearing_mev = 0.0;
  std::vector<double> values;  // 1/meV

  double energy(std::size_t j) const { return static_cast<double>(j) * step_mev; }
  /// Trapezoidal ∫S(ħω) d(ħω).
  double area() const;
};

/// Gaussian smearing (σ, meV) on a uniform grid. max_energy_mev ≤ 0 selects
/// max ħω_k + 10σ.
SpectralDensity spectral_density(const HuangRhysDecomposition& hr, double smearing_mev,
                                 double step_mev = 0.05, double max_energy_mev = 0.0);

enum class ZplProfile { Gaussian, Lorentzian };

struct LineshapeOptions {
  double zpl_energy_ev = 0.0;
  double temperature_k = 0.0;
  double zpl_width_mev = 1.0;         // FWHM of the ZPL broadening
  ZplProfile profile = ZplProfile::Gaussian;
  double phonon_smearing_mev = 1.0;   // Gaussian σ applied to every mode
  double resolution_mev = 0.05;       // energy grid step
  double min_span_below_ev = 0.5;     // grid reaches at least E_zpl − this
};

struct Spectrum {
  std::vector<double> energy_ev;         // ascending, uniform
  std::vector<double> intensity_per_ev;
  double zpl_energy_ev = 0.0;
  double total_hr = 0.0;
  double debye_waller = 0.0;
  double zpl_width_mev = 0.0;
  double phonon_smearing_mev = 0.0;
  double temperature_k = 0.0;
  ZplProfile profile = ZplProfile::Gaussian;

  double step_ev() const { return energy_ev.size() > 1 ? energy_ev[1] - energy_ev[0] : 0.0; }
  double peak() const;
  /// Trapezoidal integral over the whole grid.
  double integral() const;
  /// Σ intensity·ΔE over grid points with lo ≤ E ≤ hi.
  double integrate(double lo_ev, double hi_ev) const;
  /// Linear interpolation; zero outside the grid.
  double interpolate(double e_ev) const;
};

/// From discrete modes; each mode is smeared by options.phonon_smearing_mev.
Spectrum generating_function_spectrum(const HuangRhysDecomposition& hr,
                                      const LineshapeOptions& options);
/// From a sampled spectral density (its own smearing is used; its step must
/// equal options.resolution_mev).
Spectrum generating_function_spectrum(const SpectralDensity& density,
                                      const LineshapeOptions& options);

/// Two-column text with `#` metadata rows.
std::string serialize(const Spectrum& spectrum);

}  // namespace dpk::lineshape

#endif  // DPK_LINESHAPE_HPP
