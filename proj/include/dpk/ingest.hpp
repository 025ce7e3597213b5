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

#ifndef DPK_INGEST_HPP
#define DPK_INGEST_HPP

/// @file ingest.hpp
/// Domain types shared by every module and the parsers/serializers for the
/// four line-oriented input formats (structure, phonon, grid, manifest).
///
/// All parsers are pure functions of their input text. They validate every
/// invariant of the returned type and throw dpk::Error on violation; values
/// are never silently truncated or defaulted. Serializers emit the canonical
/// form: parse(serialize(x)) == x and serialize(parse(c)) == c for canonical c.
///
/// Units at the format boundary: Å, amu, eV, meV (phonons), μ_B/Å³ (spin
/// density), Å^(-3/2) (orbitals).

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace dpk {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Non-fatal diagnostics collected while parsing.
using Warnings = std::vector<std::string>;

// ---------------------------------------------------------------------------
// Structures

struct Atom {
  std::string species;
  double mass_amu = 0.0;
  Vec3 position = Vec3::Zero();  // Cartesian, Å
};

struct DefectConfiguration {
  Mat3 lattice = Mat3::Zero();  // rows are the lattice vectors, Å
  std::vector<Atom> atoms;
  int charge = 0;
  std::string label;

  std::size_t size() const { return atoms.size(); }
  /// Fractional coordinates of a Cartesian vector in this lattice.
  Vec3 to_fractional(const Vec3& cartesian) const;
};

bool is_known_element(std::string_view symbol);

DefectConfiguration parse_structure(std::string_view text);
std::string serialize(const DefectConfiguration& config);
/// Checks all DefectConfiguration invariants; throws on the first violation.
void validate(const DefectConfiguration& config);

// ---------------------------------------------------------------------------
// Phonons

struct PhononBasis {
  std::size_t natoms = 0;
  std::vector<int> mode_index;           // as declared in the file
  std::vector<double> energies_mev;      // ħω_k
  Eigen::MatrixXd eigenvectors;          // 3·natoms x nmodes, column k is e_k

  std::size_t size() const { return energies_mev.size(); }
  /// Modes declared with zero frequency (translations); excluded from
  /// Huang-Rhys sums.
  bool is_zero_mode(std::size_t k) const;
  std::size_t zero_mode_count() const;
};

struct PhononParseOptions {
  double orthonormality_tolerance = 1e-6;
  /// |ħω| at or below this is a zero (translational) mode.
  double zero_mode_threshold_mev = 1e-6;
};

PhononBasis parse_phonons(std::string_view text, const PhononParseOptions& options = {});
std::string serialize(const PhononBasis& basis);

// ---------------------------------------------------------------------------
// Volumetric grids

enum class FieldKind { SpinDensity, Orbital };

std::string_view to_string(FieldKind kind);

struct ScalarField {
  FieldKind kind = FieldKind::SpinDensity;
  double expected_norm = 0.0;            // 2S for spin density, 1 for orbitals
  Vec3 origin = Vec3::Zero();
  Mat3 axes = Mat3::Zero();              // rows are voxel step vectors, Å
  std::array<std::size_t, 3> counts{};   // NX, NY, NZ
  std::vector<double> values;            // iz fastest, ix slowest

  std::size_t size() const { return values.size(); }
  std::size_t index(std::size_t ix, std::size_t iy, std::size_t iz) const {
    return (ix * counts[1] + iy) * counts[2] + iz;
  }
  double at(std::size_t ix, std::size_t iy, std::size_t iz) const {
    return values[index(ix, iy, iz)];
  }
  Vec3 position(std::size_t ix, std::size_t iy, std::size_t iz) const {
    return origin + static_cast<double>(ix) * axes.row(0).transpose() +
           static_cast<double>(iy) * axes.row(1).transpose() +
           static_cast<double>(iz) * axes.row(2).transpose();
  }
  double voxel_volume() const { return std::abs(axes.determinant()); }
  /// ∫ρ d³r for spin density, (∫|ψ|² d³r)^(1/2) for orbitals.
  double measured_norm() const;
  /// Declared spin S for spin-density grids (expected_norm / 2).
  double spin() const { return 0.5 * expected_norm; }
  bool same_grid(const ScalarField& other, double tolerance = 1e-9) const;
};

struct GridParseOptions {
  double warn_fraction = 0.02;   // silent below
  double error_fraction = 0.05;  // NormalizationError above
};

ScalarField parse_grid(std::string_view text, Warnings* warnings = nullptr,
                       const GridParseOptions& options = {});
std::string serialize(const ScalarField& field);
/// Normalization check alone (used by parse_grid and by generated fields).
void check_normalization(const ScalarField& field, Warnings* warnings,
                         const GridParseOptions& options = {});

// ---------------------------------------------------------------------------
// Energy manifests

struct EigenLevel {
  double energy_ev = 0.0;
  double occupation = 0.0;  // [0, 2]
  double kweight = 1.0;
  int kpoint = 0;
};

struct ManifestEntry {
  std::string label;
  int charge = 0;
  double energy_ev = 0.0;
  double correction_ev = 0.0;
  std::map<std::string, int> added_atoms;  // stoichiometry relative to bulk
  std::vector<EigenLevel> levels;
};

struct EnergyManifest {
  double bulk_energy_ev = 0.0;
  double valence_band_ev = 0.0;
  double conduction_band_ev = 0.0;
  std::map<std::string, double> chemical_potentials_ev;
  std::map<std::string, std::string> metadata;  // provenance, kept verbatim
  std::vector<ManifestEntry> entries;

  double gap() const { return conduction_band_ev - valence_band_ev; }
  const ManifestEntry* find(std::string_view label) const;
};

EnergyManifest parse_manifest(std::string_view text);
std::string serialize(const EnergyManifest& manifest);

}  // namespace dpk

#endif  // DPK_INGEST_HPP
