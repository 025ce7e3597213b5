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

// Writes the synthetic carbon-interstitial case study into a directory.
//
//   make_fixtures <out_dir>
//
// Every file is deterministic. The structures are an ideal 4x4x4 Si
// supercell with one site replaced by a [001] C-Si dumbbell; the excited
// geometry is displaced along twelve localized modes whose partial
// Huang-Rhys factors are prescribed.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "dpk/constants.hpp"
#include "dpk/ingest.hpp"
#include "dpk/kinetics.hpp"
#include "dpk/lineshape.hpp"
#include "dpk/spinham.hpp"
#include "dpk/text_io.hpp"

namespace {

namespace fs = std::filesystem;
using dpk::Mat3;
using dpk::Vec3;

constexpr double kLatticeA = 5.4307;
constexpr int kCells = 4;
constexpr double kMassSi = 28.0855;
constexpr double kMassC = 12.011;
constexpr double kHalfDumbbell = 0.875;
constexpr double kTotalHr = 2.88;

void write(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

dpk::DefectConfiguration ground_structure(std::size_t& carbon, std::size_t& partner) {
  dpk::DefectConfiguration c;
  c.lattice = Mat3::Identity() * (kCells * kLatticeA);
  c.charge = 0;
  c.label = "C_i(0) [001] C-Si dumbbell, ideal Si 4x4x4";
  const double basis[8][3] = {{0, 0, 0},          {0, 0.5, 0.5},      {0.5, 0, 0.5},
                              {0.5, 0.5, 0},      {0.25, 0.25, 0.25}, {0.25, 0.75, 0.75},
                              {0.75, 0.25, 0.75}, {0.75, 0.75, 0.25}};
  const Vec3 site(2 * kLatticeA, 2 * kLatticeA, 2 * kLatticeA);
  for (int i = 0; i < kCells; ++i)
    for (int j = 0; j < kCells; ++j)
      for (int k = 0; k < kCells; ++k)
        for (const auto& b : basis) {
          const Vec3 r = kLatticeA * Vec3(i + b[0], j + b[1], k + b[2]);
          if ((r - site).norm() < 1e-9) {
            carbon = c.atoms.size();
            c.atoms.push_back({"C", kMassC, site - Vec3(0, 0, kHalfDumbbell)});
            partner = c.atoms.size();
            c.atoms.push_back({"Si", kMassSi, site + Vec3(0, 0, kHalfDumbbell)});
          } else {
            c.atoms.push_back({"Si", kMassSi, r});
          }
        }
  return c;
}

void audit(const dpk::DefectConfiguration& c, std::size_t carbon, std::size_t partner) {
  std::size_t si = 0, cc = 0;
  for (const auto& a : c.atoms) (a.species == "Si" ? si : cc) += 1;
  const double bond = (c.atoms[carbon].position - c.atoms[partner].position).norm();
  double closest = 1e9;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j)
      closest = std::min(closest, (c.atoms[i].position - c.atoms[j].position).norm());
  std::cerr << "audit: " << si << " Si, " << cc << " C, C-Si bond " << bond
            << " A, closest pair " << closest << " A\n";
  if (si != 512 || cc != 1 || std::abs(bond - 2 * kHalfDumbbell) > 1e-12 || closest < 1.5)
    throw std::runtime_error("structure audit failed");
}

// Translations plus twelve random modes on the dumbbell and its neighbours,
// orthonormalized in the mass-weighted metric.
dpk::PhononBasis phonons(const dpk::DefectConfiguration& c, std::size_t carbon) {
  const std::size_t n = c.size();
  const Vec3 center = c.atoms[carbon].position + Vec3(0, 0, kHalfDumbbell);
  std::vector<std::size_t> local;
  for (std::size_t a = 0; a < n; ++a)
    if ((c.atoms[a].position - center).norm() < 2.6) local.push_back(a);

  std::vector<Eigen::VectorXd> vecs;
  for (int d = 0; d < 3; ++d) {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(static_cast<long>(3 * n));
    for (std::size_t a = 0; a < n; ++a) t[static_cast<long>(3 * a) + d] = std::sqrt(c.atoms[a].mass_amu);
    vecs.push_back(t.normalized());
  }
  std::mt19937_64 rng(20260101);
  std::normal_distribution<double> g;
  while (vecs.size() < 15) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<long>(3 * n));
    for (std::size_t a : local)
      for (int d = 0; d < 3; ++d) v[static_cast<long>(3 * a) + d] = g(rng);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : vecs) v -= u.dot(v) * u;
    vecs.push_back(v.normalized());
  }

  dpk::PhononBasis b;
  b.natoms = n;
  b.eigenvectors.resize(static_cast<long>(3 * n), 15);
  for (int k = 0; k < 15; ++k) {
    b.mode_index.push_back(k + 1);
    b.energies_mev.push_back(k < 3 ? 0.0 : 12.0 + (k - 3) * (64.0 - 12.0) / 11.0);
    b.eigenvectors.col(k) = vecs[static_cast<std::size_t>(k)];
  }
  return b;
}

dpk::DefectConfiguration excited_structure(const dpk::DefectConfiguration& ground,
                                           const dpk::PhononBasis& b) {
  std::vector<double> weight(15, 0.0);
  double sum = 0.0;
  for (int k = 3; k < 15; ++k) {
    const double e = b.energies_mev[static_cast<std::size_t>(k)];
    weight[static_cast<std::size_t>(k)] = std::exp(-0.5 * std::pow((e - 23.0) / 9.0, 2));
    sum += weight[static_cast<std::size_t>(k)];
  }
  Eigen::VectorXd disp = Eigen::VectorXd::Zero(b.eigenvectors.rows());
  double mean = 0.0;
  for (int k = 3; k < 15; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const double s = kTotalHr * weight[ku] / sum;
    mean += s * b.energies_mev[ku] / kTotalHr;
    const double q = dpk::lineshape::projection_for_hr(b.energies_mev[ku], s);
    disp += (k % 2 ? q : -q) * b.eigenvectors.col(k);
  }
  std::cerr << "mean phonon energy " << mean << " meV\n";

  dpk::DefectConfiguration e = ground;
  e.label = "C_i(0) bound-exciton excited state, displaced along 12 localized modes";
  double largest = 0.0;
  for (std::size_t a = 0; a < e.size(); ++a) {
    const Vec3 d = disp.segment<3>(static_cast<long>(3 * a)) / std::sqrt(e.atoms[a].mass_amu);
    largest = std::max(largest, d.norm());
    e.atoms[a].position += d;
  }
  std::cerr << "largest displacement " << largest << " A\n";
  return e;
}

std::string manifest() {
  return "# Three charge states of C_i back-solved so that the formation energies\n"
         "# are 3.40 (+), 3.72 (0) and 4.69 (-) eV at E_F = E_v.\n"
         "bulk_energy = -2494\n"
         "e_v = 0\n"
         "e_c = 1.16\n"
         "mu.C = -9.72\n"
         "encut_density_ev = 840\n"
         "encut_wavefunction_ev = 420\n"
         "source = synthetic_backsolved\n"
         "entry Ci+ charge=1 energy=-2500.44 corr=0.12 dn.C=1\n"
         "entry Ci0 charge=0 energy=-2500 corr=0 dn.C=1\n"
         "  level 0.32 occ=2 kweight=0.5 k=0\n"
         "  level 0.33 occ=2 kweight=0.5 k=1\n"
         "entry Ci- charge=-1 energy=-2499.18 corr=0.15 dn.C=1\n"
         "  level 1.17 occ=0.5 kweight=0.5 k=0\n"
         "  level 1.19 occ=0.5 kweight=0.5 k=1\n";
}

// Rectilinear grid centred on the origin.
dpk::ScalarField cube(dpk::FieldKind kind, double norm, std::size_t n, double h) {
  dpk::ScalarField f;
  f.kind = kind;
  f.expected_norm = norm;
  f.counts = {n, n, n};
  f.axes = Mat3::Identity() * h;
  const double half = 0.5 * static_cast<double>(n - 1) * h;
  f.origin = Vec3(-half, -half, -half);
  f.values.assign(n * n * n, 0.0);
  return f;
}

template <class F>
void fill(dpk::ScalarField& f, F&& fn) {
  for (std::size_t ix = 0; ix < f.counts[0]; ++ix)
    for (std::size_t iy = 0; iy < f.counts[1]; ++iy)
      for (std::size_t iz = 0; iz < f.counts[2]; ++iz)
        f.values[f.index(ix, iy, iz)] = fn(f.position(ix, iy, iz));
}

void normalize(dpk::ScalarField& f) {
  const double target = f.expected_norm;
  const double measured = f.measured_norm();
  const double scale = f.kind == dpk::FieldKind::Orbital ? target / measured : target / measured;
  for (double& v : f.values) v *= scale;
}

// S = 1/2 density of an sp hybrid on the carbon nucleus at the origin.
// The s admixture is tuned so that A_xx/A_zz ≈ 0.07.
dpk::ScalarField hyperfine_density() {
  auto density = [](double s_weight) {
    auto f = cube(dpk::FieldKind::SpinDensity, 1.0, 25, 0.25);
    fill(f, [&](const Vec3& r) {
      const double psi = s_weight * std::exp(-r.squaredNorm() / 0.5) +
                         r.z() * std::exp(-r.squaredNorm() / 0.8);
      return psi * psi;
    });
    normalize(f);
    return f;
  };
  const auto g = *dpk::spinham::nuclear_g_factor("13C");
  auto ratio = [&](double w) {
    const auto h = dpk::spinham::hyperfine_from_spin_density(density(w), {"13C", Vec3::Zero(), g});
    return h.principal[0] / h.principal[2];
  };
  double lo = 0.0, hi = 2.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ratio(mid) < 0.07 ? lo : hi) = mid;
  }
  const double w = std::round(0.5 * (lo + hi) * 1e4) / 1e4;
  auto f = density(w);
  const auto h = dpk::spinham::hyperfine_from_spin_density(f, {"13C", Vec3::Zero(), g});
  std::cerr << "sp admixture " << w << ", A principal " << h.principal.transpose() << " MHz\n";
  return f;
}

// C 2p_x lobe below and Si 3p_y lobe above, one electron each.
dpk::ScalarField triplet_density() {
  constexpr double kWidthC = 1.5, kWidthSi = 2.5;
  auto f = cube(dpk::FieldKind::SpinDensity, 2.0, 24, 0.35);
  const Vec3 c(0, 0, -kHalfDumbbell), si(0, 0, kHalfDumbbell);
  auto lobe = [](const Vec3& d, int axis, double width) {
    return d[axis] * d[axis] * std::exp(-d.squaredNorm() / width);
  };
  double nc = 0.0, ns = 0.0;
  for (std::size_t ix = 0; ix < f.counts[0]; ++ix)
    for (std::size_t iy = 0; iy < f.counts[1]; ++iy)
      for (std::size_t iz = 0; iz < f.counts[2]; ++iz) {
        const Vec3 r = f.position(ix, iy, iz);
        nc += lobe(r - c, 0, kWidthC);
        ns += lobe(r - si, 1, kWidthSi);
      }
  fill(f, [&](const Vec3& r) { return lobe(r - c, 0, kWidthC) / nc + lobe(r - si, 1, kWidthSi) / ns; });
  normalize(f);
  return f;
}

std::pair<dpk::ScalarField, dpk::ScalarField> orbitals() {
  const double alpha = 1.0;
  auto gi = cube(dpk::FieldKind::Orbital, 1.0, 32, 0.2);
  auto gf = gi;
  const double norm = std::pow(2.0 * alpha / dpk::constants::pi, 0.75);
  fill(gi, [&](const Vec3& r) { return norm * std::exp(-alpha * r.squaredNorm()); });
  fill(gf, [&](const Vec3& r) {
    return 2.0 * std::sqrt(alpha) * r.x() * norm * std::exp(-alpha * r.squaredNorm());
  });
  return {gi, gf};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <out_dir>\n";
    return 2;
  }
  try {
    const fs::path out(argv[1]);
    fs::create_directories(out);

    std::size_t carbon = 0, partner = 0;
    const auto ground = ground_structure(carbon, partner);
    audit(ground, carbon, partner);
    const auto basis = phonons(ground, carbon);
    const auto excited = excited_structure(ground, basis);
    write(out / "ground.struct", dpk::serialize(ground));
    write(out / "excited.struct", dpk::serialize(excited));
    write(out / "phonons.txt", dpk::serialize(basis));

    const auto hr = dpk::lineshape::partial_hr_factors(
        dpk::lineshape::mass_weighted_displacement(ground, excited), basis);
    std::cerr << "S_tot from files " << hr.total << "\n";

    write(out / "manifest.txt", manifest());
    write(out / "rates.conf", dpk::kinetics::serialize(dpk::kinetics::default_ci_config()));
    write(out / "spin_density.grid", dpk::serialize(hyperfine_density()));
    write(out / "triplet_density.grid", dpk::serialize(triplet_density()));
    const auto [oi, of] = orbitals();
    write(out / "orbital_i.grid", dpk::serialize(oi));
    write(out / "orbital_f.grid", dpk::serialize(of));
    write(out / "point_spins.txt", "# two unit spins 1 nm apart along z\n0 0 0 1\n0 0 10 1\n");
    write(out / "case.conf",
          "# Scalar defaults picked up by `dpk --fixtures <dir>`.\n"
          "ezpl-ev = 0.856\n"
          "dipole-debye = 0.96\n"
          "n = 3.485\n"
          "d-mhz = 439.3\n"
          "e-mhz = 37.9\n"
          "abundance = 0.045\n"
          "sites = 4\n"
          "nucleus = 13C\n"
          "position = 0 0 0\n"
          "power = 0.5\n"
          "exciton-level-ev = 0.29\n"
          "n-entry = Ci0\n"
          "n1-entry = Ci+\n"
          "homo-ev = 0.32\n");
  } catch (const std::exception& e) {
    std::cerr << "make_fixtures: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
