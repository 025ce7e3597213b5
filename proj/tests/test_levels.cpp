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

#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "dpk/levels.hpp"
#include "support.hpp"

using namespace dpk;
using namespace dpk::levels;
using dpk::test::throws_code;

namespace {

ManifestEntry entry(std::string label, int q, double e, double corr = 0.0, int dn_c = 0) {
  ManifestEntry x;
  x.label = std::move(label);
  x.charge = q;
  x.energy_ev = e;
  x.correction_ev = corr;
  if (dn_c) x.added_atoms["C"] = dn_c;
  return x;
}

EnergyManifest base(double ev = 0.0, double ec = 1.16) {
  EnergyManifest m;
  m.bulk_energy_ev = -2494.0;
  m.valence_band_ev = ev;
  m.conduction_band_ev = ec;
  m.chemical_potentials_ev["C"] = -9.72;
  return m;
}

// Formula written out independently of the library.
double oracle_formation(const EnergyManifest& m, const ManifestEntry& e, double ef) {
  double mu = 0.0;
  for (const auto& [s, n] : e.added_atoms) mu += n * m.chemical_potentials_ev.at(s);
  return e.energy_ev - m.bulk_energy_ev - mu + e.charge * (m.valence_band_ev + ef) + e.correction_ev;
}

EnergyManifest random_manifest(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> e(-5.0, 5.0), corr(0.0, 0.3), ev(-1.0, 1.0), gap(0.3, 3.0),
      mu(-12.0, -3.0);
  std::uniform_int_distribution<int> nq(2, 5), dn(-2, 2);
  auto m = base(ev(rng));
  m.conduction_band_ev = m.valence_band_ev + gap(rng);
  m.bulk_energy_ev = e(rng);
  m.chemical_potentials_ev["C"] = mu(rng);
  m.chemical_potentials_ev["Si"] = mu(rng);
  const int count = nq(rng);
  const int top = std::uniform_int_distribution<int>(-1, 2)(rng);
  for (int i = 0; i < count; ++i) {
    auto x = entry("E" + std::to_string(i), top - i, e(rng), corr(rng));
    x.added_atoms["C"] = dn(rng);
    x.added_atoms["Si"] = dn(rng);
    m.entries.push_back(x);
  }
  return m;
}

}  // namespace

TEST_SUITE("levels") {
  TEST_CASE("neutral formation energy") {
    auto m = base();
    m.entries.push_back(entry("X0", 0, -2500.0, 0.0, 1));
    CHECK(formation_energy(m, "X0", 0.0) == doctest::Approx(3.72).epsilon(1e-12));
    CHECK(formation_energy(m, "X0", 0.7) == doctest::Approx(3.72).epsilon(1e-12));
    CHECK(throws_code([&] { formation_energy(m, "nope", 0.0); }, ErrorCode::UnknownEntry));
    m.entries[0].added_atoms["Ge"] = 1;
    CHECK(throws_code([&] { formation_energy(m, "X0", 0.0); }, ErrorCode::MissingChemicalPotential));
  }

  TEST_CASE("slope equals charge") {
    auto m = base(0.25);
    m.entries.push_back(entry("P", 1, -2500.44, 0.12, 1));
    const auto line = formation_line(m, "P");
    CHECK(line.slope() == 1.0);
    CHECK(formation_energy(m, "P", 0.4) - formation_energy(m, "P", 0.3) ==
          doctest::Approx(0.1).epsilon(1e-9));
    CHECK(formation_energy(m, "P", 0.3) == doctest::Approx(oracle_formation(m, m.entries[0], 0.3)).epsilon(1e-13));
  }

  TEST_CASE("table fixture levels") {
    const auto m = parse_manifest(test::read_fixture("manifest.txt"));
    CHECK(formation_energy(m, "Ci0", 0.0) == doctest::Approx(3.72).epsilon(1e-12));
    CHECK(formation_energy(m, "Ci+", 0.0) == doctest::Approx(3.40).epsilon(1e-12));
    CHECK(formation_energy(m, "Ci-", 0.0) == doctest::Approx(4.69).epsilon(1e-12));
    const auto plus = transition_level(m, 1, 0);
    const auto minus = transition_level(m, 0, -1);
    CHECK(plus.label() == "(+/0)");
    CHECK(minus.label() == "(0/-)");
    CHECK(std::abs(plus.position_ev - 0.32) < 1e-12);
    CHECK(std::abs(minus.position_ev - 0.97) < 1e-12);
    CHECK(transition_level(m, 0, 1).label() == "(+/0)");
    CHECK(throws_code([&] { transition_level(m, 0, 0); }, ErrorCode::SameCharge));
    CHECK(throws_code([&] { transition_level(m, 2, 0); }, ErrorCode::UnknownEntry));
  }

  TEST_CASE("symmetric toy crosses at mid-gap") {
    auto m = base(0.0, 1.0);
    m.bulk_energy_ev = 0.0;
    m.entries = {entry("A", 1, 1.0), entry("B", 0, 1.5)};
    CHECK(transition_level(m, 1, 0).position_ev == doctest::Approx(0.5).epsilon(1e-12));
  }

  TEST_CASE("1000 random manifests: levels are line crossings") {
    std::mt19937_64 rng(2026);
    for (int trial = 0; trial < 1000; ++trial) {
      const auto m = random_manifest(rng);
      for (std::size_t i = 0; i + 1 < m.entries.size(); ++i) {
        const auto& a = m.entries[i];
        const auto& b = m.entries[i + 1];
        const auto t = transition_level(m, a.charge, b.charge);
        // Brute-force oracle: the two lines meet where their difference vanishes.
        const double fa0 = oracle_formation(m, a, 0.0), fb0 = oracle_formation(m, b, 0.0);
        const double cross = (fb0 - fa0) / (a.charge - b.charge);
        CHECK(std::abs(t.position_ev - cross) <= 1e-12 * std::max(1.0, std::abs(cross)));
        const double scale = std::max({1.0, std::abs(fa0), std::abs(fb0)});
        CHECK(std::abs(formation_energy(m, a.label, t.position_ev) -
                       formation_energy(m, b.label, t.position_ev)) <= 1e-12 * scale);
        CHECK(std::abs(formation_energy(m, a.label, 0.37) - oracle_formation(m, a, 0.37)) <= 1e-10 * scale);
      }
      // Charge is non-increasing across the diagram.
      const auto d = ctl_diagram(m, m.gap(), m.gap() / 97.0);
      for (std::size_t i = 1; i < d.samples.size(); ++i)
        CHECK(d.samples[i].charge <= d.samples[i - 1].charge);
    }
  }

  TEST_CASE("CTL diagram for the fixture") {
    const auto m = parse_manifest(test::read_fixture("manifest.txt"));
    const auto d = ctl_diagram(m, 1.16, 0.01);
    REQUIRE(d.breakpoints.size() == 2);
    CHECK(d.breakpoints[0].position_ev == doctest::Approx(0.32).epsilon(1e-12));
    CHECK(d.breakpoints[1].position_ev == doctest::Approx(0.97).epsilon(1e-12));
    for (const auto& s : d.samples) {
      // Brute-force minimization over entries at this E_F.
      double best = 1e300;
      int q = 0;
      for (const auto& e : m.entries) {
        const double f = oracle_formation(m, e, s.fermi_ev);
        if (f < best - 1e-12) {
          best = f;
          q = e.charge;
        }
      }
      CHECK(s.formation_ev == doctest::Approx(best).epsilon(1e-12));
      if (std::abs(s.fermi_ev - 0.32) > 1e-9 && std::abs(s.fermi_ev - 0.97) > 1e-9) CHECK(s.charge == q);
      const int expect = s.fermi_ev < 0.32 ? 1 : (s.fermi_ev < 0.97 ? 0 : -1);
      if (std::abs(s.fermi_ev - 0.32) > 1e-9 && std::abs(s.fermi_ev - 0.97) > 1e-9) CHECK(s.charge == expect);
    }
    CHECK(d.samples.front().fermi_ev == 0.0);
    CHECK(d.samples.back().fermi_ev == doctest::Approx(1.16));

    auto single = base();
    single.entries = {entry("X0", 0, -2500, 0, 1)};
    for (const auto& s : ctl_diagram(single, 1.16, 0.05).samples) CHECK(s.charge == 0);
    CHECK(ctl_diagram(single, 1.16, 0.05).breakpoints.empty());
  }

  TEST_CASE("spin purification") {
    CHECK(spin_purified_singlet(0.5, 0.5) == 0.5);
    CHECK(spin_purified_singlet(0.85, 0.86) == doctest::Approx(0.84).epsilon(1e-12));
    CHECK(spin_purified_singlet(0.85 + 3, 0.86 + 3) == doctest::Approx(0.84 + 3).epsilon(1e-12));
  }

  TEST_CASE("band filling") {
    const std::vector<EigenLevel> below{{0.9, 2.0, 1.0, 0}, {1.0, 1.0, 1.0, 0}};
    const auto none = band_filling_correction(below, 1.16, CarrierKind::DonorLike);
    CHECK(none.correction_ev == 0.0);
    CHECK(none.note.rfind("EmptySelection", 0) == 0);

    const std::vector<EigenLevel> one{{1.21, 1.0, 1.0, 0}};
    CHECK(band_filling_correction(one, 1.16, CarrierKind::DonorLike).correction_ev ==
          doctest::Approx(-0.05).epsilon(1e-9));

    // Multi-k table against a direct double sum.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> e(0.9, 1.5), occ(0.0, 2.0);
    std::vector<EigenLevel> table;
    const int nk = 4;
    for (int k = 0; k < nk; ++k)
      for (int n = 0; n < 5; ++n) table.push_back({e(rng), occ(rng), 1.0 / nk, k});
    double donor = 0.0, acceptor = 0.0;
    for (int k = 0; k < nk; ++k)
      for (const auto& l : table)
        if (l.kpoint == k && l.energy_ev > 1.16) {
          donor -= l.kweight * l.occupation * (l.energy_ev - 1.16);
          acceptor += l.kweight * (2.0 - l.occupation) * (l.energy_ev - 1.16);
        }
    const auto d = band_filling_correction(table, 1.16, CarrierKind::DonorLike);
    CHECK(d.correction_ev == doctest::Approx(donor).epsilon(1e-12));
    CHECK(d.correction_ev <= 0.0);
    const auto a = band_filling_correction(table, 1.16, CarrierKind::AcceptorLike);
    CHECK(a.correction_ev == doctest::Approx(acceptor).epsilon(1e-12));
    CHECK(a.correction_ev >= 0.0);
  }

  TEST_CASE("generalized Koopmans") {
    auto m = base();
    m.entries = {entry("N", 0, -105.0), entry("N-1", 1, -100.0)};
    CHECK(koopmans_check(m, "N", "N-1", -5.0) == doctest::Approx(0.0).epsilon(1e-12));
    m.entries[0].energy_ev = -105.2;
    CHECK(koopmans_check(m, "N", "N-1", -5.0) == doctest::Approx(0.2).epsilon(1e-9));
    auto flipped = m;
    flipped.entries[0].energy_ev = 105.2;
    flipped.entries[1].energy_ev = 100.0;
    CHECK(koopmans_check(flipped, "N", "N-1", 5.0) == doctest::Approx(-0.2).epsilon(1e-9));
    CHECK(throws_code([&] { koopmans_check(m, "N", "missing", 0.0); }, ErrorCode::UnknownEntry));
  }

  TEST_CASE("exciton binding") {
    const auto b = exciton_binding(1.16 - 0.87, 0.856, 1.16);
    CHECK(b.binding_ev == doctest::Approx(0.014).epsilon(1e-9));
    CHECK(b.warnings.empty());
    CHECK(exciton_binding(0.4, 0.76, 1.16).binding_ev == doctest::Approx(0.0).epsilon(1e-12));
    const auto neg = exciton_binding(0.4, 0.9, 1.16);
    CHECK(neg.binding_ev < 0.0);
    REQUIRE(neg.warnings.size() == 1);
    CHECK(neg.warnings[0].rfind("NegativeBinding", 0) == 0);
    CHECK(throws_code([] { exciton_binding(1.3, 0.5, 1.16); }, ErrorCode::LevelOutsideGap));
  }

  TEST_CASE("ZPL assembly") {
    const auto z = assemble_zpl(0.9, -0.02, -0.04);
    CHECK(std::abs(z.zpl_ev - (z.raw_ev + z.spin_purification_ev + z.band_filling_ev)) <= 1e-12);
    CHECK(z.zpl_ev == doctest::Approx(0.84).epsilon(1e-12));
    CHECK(throws_code([] { assemble_zpl(0.01, -0.02, 0.0); }, ErrorCode::NonPhysicalInput));
  }

  TEST_CASE("charge labels") {
    CHECK(charge_label(0) == "0");
    CHECK(charge_label(1) == "+");
    CHECK(charge_label(-2) == "2-");
  }
}
