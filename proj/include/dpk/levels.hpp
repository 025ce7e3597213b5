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

#ifndef DPK_LEVELS_HPP
#define DPK_LEVELS_HPP

/// @file levels.hpp
/// Formation energies, charge-transition levels and ZPL bookkeeping. All
/// energies in eV; Fermi levels are measured from the valence-band maximum.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dpk/ingest.hpp"

namespace dpk::levels {

/// E_f(E_F) = intercept + charge·E_F.
struct FormationEnergyLine {
  std::string label;
  int charge = 0;
  double intercept_ev = 0.0;
  double correction_ev = 0.0;

  double slope() const { return static_cast<double>(charge); }
  double at(double fermi_ev) const { return intercept_ev + slope() * fermi_ev; }
};

/// E_tot − E_bulk − Σ n_i μ_i + q(E_v + E_F) + E_corr.
FormationEnergyLine formation_line(const EnergyManifest& manifest, std::string_view label);
double formation_energy(const EnergyManifest& manifest, std::string_view label,
                        double fermi_ev);

/// "+", "0", "-", "2+", ...
std::string charge_label(int q);

struct TransitionLevel {
  int q = 0;        // higher charge
  int q_prime = 0;  // lower charge
  double position_ev = 0.0;
  bool inside_gap = true;

  /// "(q/q')" with the higher charge first.
  std::string label() const;
};

/// Lowest-energy entry per charge. Order of q and q_prime is free.
TransitionLevel transition_level(const EnergyManifest& manifest, int q, int q_prime);

struct CtlSample {
  double fermi_ev = 0.0;
  int charge = 0;
  double formation_ev = 0.0;
};

struct CtlDiagram {
  double gap_ev = 0.0;
  std::vector<TransitionLevel> breakpoints;  // exact lower-envelope kinks in (0, gap)
  std::vector<CtlSample> samples;            // E_F = 0, Δ, 2Δ, ..., gap
};

/// Stable charge minimises E_f; ties go to the higher charge.
CtlDiagram ctl_diagram(const EnergyManifest& manifest, double gap_ev, double resolution_ev);

/// 2·E_mixed − E_triplet.
double spin_purified_singlet(double mixed_ev, double triplet_ev);

enum class CarrierKind { DonorLike, AcceptorLike };

struct BandFilling {
  double correction_ev = 0.0;  // add to the raw total energy
  std::string note;            // set when no state lies beyond the edge
};

/// Donor-like: −Σ w η (ε − ε_CBM) for ε > ε_CBM.
/// Acceptor-like: +Σ w (η_full − η)(ε − ε_VBM) for ε > ε_VBM.
BandFilling band_filling_correction(std::span<const EigenLevel> levels, double edge_ev,
                                    CarrierKind kind, double full_occupation = 2.0);

/// ε_HOMO − [E(N) − E(N−1)], with per-entry corrections applied.
double koopmans_check(const EnergyManifest& manifest, std::string_view n_label,
                      std::string_view n_minus_one_label, double homo_ev);

struct ExcitonBinding {
  double binding_ev = 0.0;
  Warnings warnings;  // NegativeBinding when unbound
};

/// (gap − level) − E_zpl.
ExcitonBinding exciton_binding(double level_above_vbm_ev, double zpl_ev, double gap_ev);

struct ZplResult {
  double raw_ev = 0.0;
  double spin_purification_ev = 0.0;
  double band_filling_ev = 0.0;
  double zpl_ev = 0.0;
};

ZplResult assemble_zpl(double raw_ev, double spin_purification_ev, double band_filling_ev);

}  // namespace dpk::levels

#endif  // DPK_LEVELS_HPP
