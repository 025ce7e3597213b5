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

#include "dpk/photophysics.hpp"

#include <cmath>

#include "dpk/constants.hpp"
#include "dpk/error.hpp"
#include "dpk/kernels.hpp"
#include "dpk/text_io.hpp"

namespace dpk::photophysics {

namespace c = dpk::constants;

namespace {

void check_orbital_pair(const ScalarField& a, const ScalarField& b) {
  if (a.kind != FieldKind::Orbital || b.kind != FieldKind::Orbital)
    throw Error(ErrorCode::KindMismatch, "transition dipole needs two orbital grids");
  if (!a.same_grid(b))
    throw Error(ErrorCode::GridMismatch, "orbital grids differ in counts, origin or axes");
}

// Weighted points for the centroid (ψ_i² + ψ_f²)/2 and the overlap density ψ_i ψ_f.
void build_points(const ScalarField& psi_i, const ScalarField& psi_f,
                  std::vector<kernels::WeightedPoint>& density,
                  std::vector<kernels::WeightedPoint>& overlap) {
  const double dv = psi_i.voxel_volume();
  density.reserve(psi_i.size());
  overlap.reserve(psi_i.size());
  for (std::size_t ix = 0; ix < psi_i.counts[0]; ++ix)
    for (std::size_t iy = 0; iy < psi_i.counts[1]; ++iy)
      for (std::size_t iz = 0; iz < psi_i.counts[2]; ++iz) {
        const std::size_t k = psi_i.index(ix, iy, iz);
        const Vec3 r = psi_i.position(ix, iy, iz);
        const double a = psi_i.values[k], b = psi_f.values[k];
        density.push_back({r, 0.5 * (a * a + b * b) * dv});
        overlap.push_back({r, a * b * dv});
      }
}

template <class MomentsFn>
TransitionDipole dipole_with(const ScalarField& psi_i, const ScalarField& psi_f,
                             MomentsFn&& moments) {
  check_orbital_pair(psi_i, psi_f);
  std::vector<kernels::WeightedPoint> density, overlap;
  build_points(psi_i, psi_f, density, overlap);
  const kernels::Moments d = moments(density);
  const kernels::Moments o = moments(overlap);
  const Vec3 origin = d.weight != 0.0 ? Vec3(d.first / d.weight) : Vec3::Zero();
  const Vec3 mu_e_angstrom = o.first - o.weight * origin;
  return TransitionDipole::from_vector(mu_e_angstrom * c::e_angstrom_in_debye,
                                       DipoleSource::Grid);
}

}  // namespace

TransitionDipole TransitionDipole::from_magnitude(double debye) {
  if (!(debye >= 0.0)) throw Error(ErrorCode::NonPhysicalInput, "dipole magnitude must be ≥ 0");
  TransitionDipole t;
  t.vector_debye = Vec3(0.0, 0.0, debye);
  t.magnitude_debye = debye;
  t.source = DipoleSource::User;
  return t;
}

TransitionDipole TransitionDipole::from_vector(const Vec3& debye, DipoleSource source) {
  TransitionDipole t;
  t.vector_debye = debye;
  t.magnitude_debye = debye.norm();
  t.source = source;
  return t;
}

TransitionDipole transition_dipole_grid(const ScalarField& psi_i, const ScalarField& psi_f) {
  return dipole_with(psi_i, psi_f, [](const auto& pts) { return kernels::moments(pts); });
}

TransitionDipole transition_dipole_grid_serial(const ScalarField& psi_i,
                                               const ScalarField& psi_f) {
  return dipole_with(psi_i, psi_f, [](const auto& pts) { return kernels::serial::moments(pts); });
}

std::string Lifetime::to_text() const { return infinite() ? "infinite" : text::sig6(seconds); }

EmitterOptics radiative_rate(double zpl_energy_ev, const TransitionDipole& dipole,
                             double refractive_index) {
  if (!(zpl_energy_ev > 0.0))
    throw Error(ErrorCode::NonPhysicalInput, "ZPL energy must be positive, got " +
                                                 text::shortest(zpl_energy_ev) + " eV");
  if (!(refractive_index >= 1.0))
    throw Error(ErrorCode::NonPhysicalInput, "refractive index must be ≥ 1, got " +
                                                 text::shortest(refractive_index));
  if (!(dipole.magnitude_debye >= 0.0))
    throw Error(ErrorCode::NonPhysicalInput, "dipole magnitude must be ≥ 0");

  const double energy = zpl_energy_ev * c::ev;
  const double mu = dipole.magnitude_debye * c::debye;
  const double hbar2 = c::hbar * c::hbar;
  const double rate = refractive_index * energy * energy * energy * mu * mu /
                      (3.0 * c::pi * c::vacuum_permittivity * c::speed_of_light *
                       c::speed_of_light * c::speed_of_light * hbar2 * hbar2);

  EmitterOptics out;
  out.zpl_energy_ev = zpl_energy_ev;
  out.refractive_index = refractive_index;
  out.dipole = dipole;
  out.rate_per_s = rate;
  if (rate > 0.0) {
    out.lifetime.kind = Lifetime::Kind::Finite;
    out.lifetime.seconds = 1.0 / rate;
  }
  return out;
}

EmitterOptics radiative_rate(double zpl_energy_ev, double dipole_debye, double refractive_index) {
  return radiative_rate(zpl_energy_ev, TransitionDipole::from_magnitude(dipole_debye),
                        refractive_index);
}

double quantum_yield(double tau_rad_s, double tau_pl_s) {
  if (!(tau_rad_s > 0.0) || !(tau_pl_s > 0.0))
    throw Error(ErrorCode::NonPhysicalInput, "lifetimes must be positive");
  if (tau_pl_s > tau_rad_s) {
    throw Error(ErrorCode::OrderViolation, "PL lifetime " + text::shortest(tau_pl_s) +
                                               " s exceeds radiative lifetime " +
                                               text::shortest(tau_rad_s) + " s");
  }
  return tau_pl_s / tau_rad_s;
}

std::string_view to_string(Irrep irrep) {
  switch (irrep) {
    case Irrep::A1: return "A1";
    case Irrep::A2: return "A2";
    case Irrep::B1: return "B1";
    case Irrep::B2: return "B2";
  }
  return "?";
}

std::optional<Irrep> parse_irrep(std::string_view s) {
  for (Irrep i : kIrreps)
    if (to_string(i) == s) return i;
  if (s == "a1") return Irrep::A1;
  if (s == "a2") return Irrep::A2;
  if (s == "b1") return Irrep::B1;
  if (s == "b2") return Irrep::B2;
  return std::nullopt;
}

Irrep irrep_product(Irrep a, Irrep b) {
  return static_cast<Irrep>(static_cast<unsigned char>(a) ^ static_cast<unsigned char>(b));
}

std::string_view to_string(Axis axis) {
  switch (axis) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    case Axis::Z: return "z";
  }
  return "?";
}

Irrep dipole_irrep(Axis axis) {
  switch (axis) {
    case Axis::X: return Irrep::B1;
    case Axis::Y: return Irrep::B2;
    case Axis::Z: return Irrep::A1;
  }
  return Irrep::A1;
}

DipoleVerdict dipole_allowed(Irrep initial, Irrep final_state) {
  DipoleVerdict v;
  for (Axis axis : {Axis::X, Axis::Y, Axis::Z}) {
    // For one-dimensional irreps the triple product "contains A1" iff it is A1.
    if (irrep_product(irrep_product(final_state, dipole_irrep(axis)), initial) == Irrep::A1)
      v.polarizations.push_back(axis);
  }
  v.allowed = !v.polarizations.empty();
  return v;
}

}  // namespace dpk::photophysics
