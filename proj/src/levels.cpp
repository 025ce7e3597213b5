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

#include "dpk/levels.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include "dpk/error.hpp"
#include "dpk/text_io.hpp"

namespace dpk::levels {

namespace {

const ManifestEntry& entry_or_throw(const EnergyManifest& m, std::string_view label) {
  const ManifestEntry* e = m.find(label);
  if (!e) throw Error(ErrorCode::UnknownEntry, "no entry labelled '" + std::string(label) + "'");
  return *e;
}

FormationEnergyLine line_for(const EnergyManifest& m, const ManifestEntry& e) {
  double mu_sum = 0.0;
  for (const auto& [species, n] : e.added_atoms) {
    if (n == 0) continue;
    const auto it = m.chemical_potentials_ev.find(species);
    if (it == m.chemical_potentials_ev.end())
      throw Error(ErrorCode::MissingChemicalPotential,
                  species + " (needed by entry '" + e.label + "')");
    mu_sum += n * it->second;
  }
  FormationEnergyLine line;
  line.label = e.label;
  line.charge = e.charge;
  line.correction_ev = e.correction_ev;
  line.intercept_ev = e.energy_ev - m.bulk_energy_ev - mu_sum +
                      e.charge * m.valence_band_ev + e.correction_ev;
  return line;
}

// Lowest intercept per charge, keyed by charge.
std::map<int, FormationEnergyLine> lines_by_charge(const EnergyManifest& m) {
  std::map<int, FormationEnergyLine> out;
  for (const auto& e : m.entries) {
    FormationEnergyLine line = line_for(m, e);
    auto it = out.find(line.charge);
    if (it == out.end() || line.intercept_ev < it->second.intercept_ev) out[line.charge] = line;
  }
  return out;
}

double crossing(const FormationEnergyLine& a, const FormationEnergyLine& b) {
  return (a.intercept_ev - b.intercept_ev) / (b.slope() - a.slope());
}

TransitionLevel make_level(const FormationEnergyLine& a, const FormationEnergyLine& b,
                           double gap) {
  TransitionLevel t;
  const bool a_high = a.charge > b.charge;
  const auto& hi = a_high ? a : b;
  const auto& lo = a_high ? b : a;
  t.q = hi.charge;
  t.q_prime = lo.charge;
  t.position_ev = crossing(hi, lo);
  t.inside_gap = t.position_ev >= 0.0 && t.position_ev <= gap;
  return t;
}

// Argmin over lines at E_F, ties to the higher charge.
const FormationEnergyLine& stable(const std::map<int, FormationEnergyLine>& lines, double ef) {
  const FormationEnergyLine* best = nullptr;
  for (auto it = lines.rbegin(); it != lines.rend(); ++it)
    if (!best || it->second.at(ef) < best->at(ef)) best = &it->second;
  return *best;
}

}  // namespace

FormationEnergyLine formation_line(const EnergyManifest& manifest, std::string_view label) {
  return line_for(manifest, entry_or_throw(manifest, label));
}

double formation_energy(const EnergyManifest& manifest, std::string_view label,
                        double fermi_ev) {
  return formation_line(manifest, label).at(fermi_ev);
}

std::string charge_label(int q) {
  if (q == 0) return "0";
  const char sign = q > 0 ? '+' : '-';
  const int mag = std::abs(q);
  return mag == 1 ? std::string(1, sign) : std::to_string(mag) + sign;
}

std::string TransitionLevel::label() const {
  return "(" + charge_label(q) + "/" + charge_label(q_prime) + ")";
}

TransitionLevel transition_level(const EnergyManifest& manifest, int q, int q_prime) {
  if (q == q_prime)
    throw Error(ErrorCode::SameCharge, "both charges are " + charge_label(q));
  const auto lines = lines_by_charge(manifest);
  const auto a = lines.find(q);
  const auto b = lines.find(q_prime);
  if (a == lines.end())
    throw Error(ErrorCode::UnknownEntry, "no entry with charge " + charge_label(q));
  if (b == lines.end())
    throw Error(ErrorCode::UnknownEntry, "no entry with charge " + charge_label(q_prime));
  return make_level(a->second, b->second, manifest.gap());
}

CtlDiagram ctl_diagram(const EnergyManifest& manifest, double gap_ev, double resolution_ev) {
  if (manifest.entries.empty()) throw Error(ErrorCode::MissingKey, "manifest has no entries");
  if (!(gap_ev > 0.0) || !(resolution_ev > 0.0))
    throw Error(ErrorCode::NonPhysicalInput, "gap and resolution must be positive");
  const auto lines = lines_by_charge(manifest);

  CtlDiagram d;
  d.gap_ev = gap_ev;

  // Walk the lower envelope: from the current line, the next kink is the
  // nearest crossing with a line of lower slope.
  const FormationEnergyLine* current = &stable(lines, 0.0);
  double x = 0.0;
  while (true) {
    const FormationEnergyLine* next = nullptr;
    double next_x = std::numeric_limits<double>::infinity();
    for (const auto& [q, line] : lines) {
      if (q >= current->charge) continue;
      const double cx = crossing(*current, line);
      if (cx < x) continue;
      if (cx < next_x || (cx == next_x && q < next->charge)) {
        next_x = cx;
        next = &line;
      }
    }
    if (!next || next_x >= gap_ev) break;
    d.breakpoints.push_back(make_level(*current, *next, gap_ev));
    current = next;
    x = next_x;
  }

  const auto n = static_cast<std::size_t>(std::floor(gap_ev / resolution_ev + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) {
    const double ef = static_cast<double>(i) * resolution_ev;
    const auto& s = stable(lines, ef);
    d.samples.push_back({ef, s.charge, s.at(ef)});
  }
  if (d.samples.back().fermi_ev < gap_ev - 1e-12 * gap_ev) {
    const auto& s = stable(lines, gap_ev);
    d.samples.push_back({gap_ev, s.charge, s.at(gap_ev)});
  }
  return d;
}

double spin_purified_singlet(double mixed_ev, double triplet_ev) {
  return 2.0 * mixed_ev - triplet_ev;
}

BandFilling band_filling_correction(std::span<const EigenLevel> levels, double edge_ev,
                                    CarrierKind kind, double full_occupation) {
  BandFilling out;
  std::size_t selected = 0;
  for (const auto& l : levels) {
    if (!(l.energy_ev > edge_ev)) continue;
    const double de = l.energy_ev - edge_ev;
    if (kind == CarrierKind::DonorLike) {
      out.correction_ev -= l.kweight * l.occupation * de;
    } else {
      out.correction_ev += l.kweight * (full_occupation - l.occupation) * de;
    }
    ++selected;
  }
  if (selected == 0) out.note = "EmptySelection: no states beyond the band edge";
  return out;
}

double koopmans_check(const EnergyManifest& manifest, std::string_view n_label,
                      std::string_view n_minus_one_label, double homo_ev) {
  const auto& n = entry_or_throw(manifest, n_label);
  const auto& m = entry_or_throw(manifest, n_minus_one_label);
  const double ionization =
      (n.energy_ev + n.correction_ev) - (m.energy_ev + m.correction_ev);
  return homo_ev - ionization;
}

ExcitonBinding exciton_binding(double level_above_vbm_ev, double zpl_ev, double gap_ev) {
  if (!(gap_ev > 0.0)) throw Error(ErrorCode::NonPhysicalInput, "gap must be positive");
  if (level_above_vbm_ev < 0.0 || level_above_vbm_ev > gap_ev) {
    throw Error(ErrorCode::LevelOutsideGap, "level at " + text::shortest(level_above_vbm_ev) +
                                                " eV outside [0, " + text::shortest(gap_ev) + "]");
  }
  ExcitonBinding b;
  b.binding_ev = (gap_ev - level_above_vbm_ev) - zpl_ev;
  if (b.binding_ev < 0.0)
    b.warnings.push_back("NegativeBinding: ZPL exceeds the ionization threshold by " +
                         text::sig6(-b.binding_ev) + " eV");
  return b;
}

ZplResult assemble_zpl(double raw_ev, double spin_purification_ev, double band_filling_ev) {
  ZplResult z;
  z.raw_ev = raw_ev;
  z.spin_purification_ev = spin_purification_ev;
  z.band_filling_ev = band_filling_ev;
  z.zpl_ev = raw_ev + spin_purification_ev + band_filling_ev;
  if (!(z.zpl_ev > 0.0))
    throw Error(ErrorCode::NonPhysicalInput, "ZPL " + text::shortest(z.zpl_ev) + " eV ≤ 0");
  return z;
}

}  // namespace dpk::levels
