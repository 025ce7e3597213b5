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

#ifndef DPK_SPINHAM_HPP
#define DPK_SPINHAM_HPP

/// @file spinham.hpp
/// Spin-spin zero-field splitting, hyperfine tensors and the S = 1 spin
/// Hamiltonian. Couplings are in MHz, positions in Å, fields in mT.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dpk/ingest.hpp"

namespace dpk::spinham {

struct PointSpin {
  Vec3 position = Vec3::Zero();
  double weight = 1.0;  // electrons; a triplet sums to 2
};

/// Sign convention: principal values ordered by |λ| ascending (x, y, z);
/// D = 3λ_z/2 keeps its sign, E = |λ_x − λ_y|/2.
struct ZfsTensor {
  Mat3 tensor = Mat3::Zero();
  Vec3 principal = Vec3::Zero();     // λ_x, λ_y, λ_z
  Mat3 axes = Mat3::Identity();      // columns are the principal directions
  double d_mhz = 0.0;
  double e_mhz = 0.0;
  double discretization_error = 0.0;  // relative, grids only

  static ZfsTensor from_tensor(const Mat3& tensor);
  /// diag(−D/3 + E, −D/3 − E, 2D/3).
  static ZfsTensor from_de(double d_mhz, double e_mhz);
};

ZfsTensor zfs_from_point_spins(std::span<const PointSpin> spins);
ZfsTensor zfs_from_point_spins_serial(std::span<const PointSpin> spins);

struct ZfsGridOptions {
  bool estimate_error = true;  // compare against a 2x2x2-coarsened grid
  double max_error = 0.05;
};

ZfsTensor zfs_from_spin_density(const ScalarField& rho, const ZfsGridOptions& options = {});

struct Nucleus {
  std::string species;  // isotope label, e.g. "13C"
  Vec3 position = Vec3::Zero();
  double g_factor = 0.0;
};

/// Known isotopes: 1H, 13C, 29Si.
std::optional<double> nuclear_g_factor(std::string_view isotope);

struct HyperfineTensor {
  Nucleus nucleus;
  Mat3 tensor = Mat3::Zero();
  double a_iso_mhz = 0.0;
  Mat3 dipolar = Mat3::Zero();
  Vec3 principal = Vec3::Zero();  // eigenvalues of tensor, |λ| ascending
};

struct HyperfineOptions {
  /// Radius of the sphere left out of the dipolar integral. ≤ 0 selects
  /// half a voxel diagonal.
  double exclusion_radius = 0.0;
};

HyperfineTensor hyperfine_from_spin_density(const ScalarField& rho, const Nucleus& nucleus,
                                            const HyperfineOptions& options = {});

/// Trilinear interpolation of a grid at a Cartesian point; nullopt outside.
std::optional<double> interpolate(const ScalarField& field, const Vec3& point);

/// Static nuclear configuration entering the Hamiltonian as m_I A·ẑ.
struct NuclearSpinState {
  Mat3 a_mhz = Mat3::Zero();
  double m_i = 0.5;
};

/// Basis order |m_S = −1⟩, |0⟩, |+1⟩.
struct SpinLevelSet {
  Vec3 energies_mhz = Vec3::Zero();  // ascending
  Eigen::Matrix3cd vectors;           // columns
  Vec3 field_mt = Vec3::Zero();
};

struct SpinMatrices {
  Eigen::Matrix3cd x, y, z;
};
const SpinMatrices& spin_one();

/// Field must satisfy |B| < 1000 mT.
SpinLevelSet triplet_levels(const ZfsTensor& zfs, const Vec3& field_mt = Vec3::Zero(),
                            std::span<const NuclearSpinState> nuclei = {});

struct OdmrLine {
  double frequency_mhz = 0.0;
  double intensity = 0.0;  // (|⟨j|S_x|i⟩|² + |⟨j|S_y|i⟩|²)^(1/2)
  bool allowed = false;
  int lower = 0;
  int upper = 0;
};

/// Nonzero pairwise differences, ascending; coincident lines are merged.
std::vector<OdmrLine> odmr_frequencies(const SpinLevelSet& levels);

/// 1 − (1 − abundance)^Σ counts.
double isotope_risk(std::span<const int> shell_site_counts, double abundance);

}  // namespace dpk::spinham

#endif  // DPK_SPINHAM_HPP
