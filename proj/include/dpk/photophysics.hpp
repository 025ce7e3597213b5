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

#ifndef DPK_PHOTOPHYSICS_HPP
#define DPK_PHOTOPHYSICS_HPP

/// @file photophysics.hpp
/// Transition dipoles, radiative rates and C2v dipole selection rules.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dpk/ingest.hpp"

namespace dpk::photophysics {

enum class DipoleSource { Grid, User };

struct TransitionDipole {
  Vec3 vector_debye = Vec3::Zero();
  double magnitude_debye = 0.0;
  DipoleSource source = DipoleSource::User;

  static TransitionDipole from_magnitude(double debye);
  static TransitionDipole from_vector(const Vec3& debye, DipoleSource source);
};

/// μ = e ∫ ψ_f(r) (r − r₀) ψ_i(r) d³r in Debye, r₀ the centroid of
/// (ψ_i² + ψ_f²)/2. Both fields must be orbitals on the same grid.
TransitionDipole transition_dipole_grid(const ScalarField& psi_i, const ScalarField& psi_f);
/// Serial reference of the same integral.
TransitionDipole transition_dipole_grid_serial(const ScalarField& psi_i,
                                               const ScalarField& psi_f);

/// Radiative lifetime. A zero rate yields the Infinite kind rather than a
/// floating-point infinity.
struct Lifetime {
  enum class Kind { Finite, Infinite };
  Kind kind = Kind::Infinite;
  double seconds = 0.0;

  bool infinite() const { return kind == Kind::Infinite; }
  std::string to_text() const;
};

struct EmitterOptics {
  double zpl_energy_ev = 0.0;
  double refractive_index = 1.0;
  TransitionDipole dipole;
  double rate_per_s = 0.0;
  Lifetime lifetime;
};

/// Γ_rad = n_D E³ μ² / (3π ε₀ c³ ħ⁴) in SI.
EmitterOptics radiative_rate(double zpl_energy_ev, const TransitionDipole& dipole,
                             double refractive_index);
EmitterOptics radiative_rate(double zpl_energy_ev, double dipole_debye, double refractive_index);

/// τ_pl / τ_rad.
double quantum_yield(double tau_rad_s, double tau_pl_s);

// C2v --------------------------------------------------------------------

/// Encoded by the characters under (C2, σv(xz)): bit 1 set ⇔ χ(C2) = −1,
/// bit 0 set ⇔ χ(σv(xz)) = −1. The product is then XOR.
enum class Irrep : unsigned char { A1 = 0, A2 = 1, B1 = 2, B2 = 3 };

inline constexpr std::array<Irrep, 4> kIrreps{Irrep::A1, Irrep::A2, Irrep::B1, Irrep::B2};

std::string_view to_string(Irrep irrep);
std::optional<Irrep> parse_irrep(std::string_view text);
Irrep irrep_product(Irrep a, Irrep b);

enum class Axis { X, Y, Z };
std::string_view to_string(Axis axis);
/// x → B1, y → B2, z → A1.
Irrep dipole_irrep(Axis axis);

struct DipoleVerdict {
  bool allowed = false;
  std::vector<Axis> polarizations;  // in x, y, z order
};

DipoleVerdict dipole_allowed(Irrep initial, Irrep final_state);

}  // namespace dpk::photophysics

#endif  // DPK_PHOTOPHYSICS_HPP
