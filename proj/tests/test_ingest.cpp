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
#include <sstream>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "dpk/constants.hpp"
#include "dpk/ingest.hpp"
#include "support.hpp"

using namespace dpk;
using dpk::test::throws_code;

namespace {

const char* kTwoAtoms =
    "lattice\n"
    "5 0 0\n"
    "0 5 0\n"
    "0 0 5\n"
    "charge 0\n"
    "atoms 2\n"
    "Si 28.0855 0 0 0\n"
    "C 12.011 1.5 1.5 1.5\n";

std::string grid_text(std::size_t nx, std::size_t ny, std::size_t nz, const std::string& kind,
                      double norm, const std::string& body) {
  std::ostringstream s;
  s << "grid " << nx << " " << ny << " " << nz << " " << kind << " " << norm << "\n"
    << "origin 0 0 0\naxis1 1 0 0\naxis2 0 1 0\naxis3 0 0 1\n"
    << body;
  return s.str();
}

const char* kMinimalManifest =
    "bulk_energy = -100\n"
    "e_v = 0\n"
    "e_c = 1\n"
    "entry X0 charge=0 energy=-99\n";

}  // namespace

TEST_SUITE("ingest") {
  TEST_CASE("minimal two-atom structure") {
    const auto c = parse_structure(kTwoAtoms);
    CHECK(c.size() == 2);
    CHECK(c.charge == 0);
    CHECK(c.atoms[1].species == "C");
    CHECK(c.atoms[1].position.x() == doctest::Approx(1.5));
  }

  TEST_CASE("structure error classes") {
    std::string singular = kTwoAtoms;
    singular.replace(singular.find("0 0 5"), 5, "5 0 0");
    CHECK(throws_code([&] { parse_structure(singular); }, ErrorCode::SingularLattice));

    std::string unknown = kTwoAtoms;
    unknown.replace(unknown.find("C 12"), 1, "Qq");
    CHECK(throws_code([&] { parse_structure(unknown); }, ErrorCode::UnknownSpecies));

    std::string nan = kTwoAtoms;
    nan.replace(nan.find("1.5 1.5 1.5"), 3, "nan");
    CHECK(throws_code([&] { parse_structure(nan); }, ErrorCode::NonFiniteValue));

    std::string inf = kTwoAtoms;
    inf.replace(inf.find("0 5 0"), 1, "inf");
    CHECK(throws_code([&] { parse_structure(inf); }, ErrorCode::NonFiniteValue));

    std::string short_line = kTwoAtoms;
    short_line.replace(short_line.find(" 1.5 1.5 1.5"), 4, "");
    CHECK(throws_code([&] { parse_structure(short_line); }, ErrorCode::MalformedLine));

    CHECK(throws_code([&] { parse_structure(std::string(kTwoAtoms) + "Si 28 0 0 0\n"); },
                      ErrorCode::TrailingData));
    CHECK(throws_code([&] { parse_structure("lattice\n1 0 0\n"); }, ErrorCode::MalformedLine));
  }

  TEST_CASE("malformed line names the line and token") {
    std::string bad = kTwoAtoms;
    bad.replace(bad.find("charge 0"), 8, "charge x");
    try {
      parse_structure(bad);
      FAIL("expected an error");
    } catch (const Error& e) {
      const std::string what = e.what();
      CHECK(what.find("line 5") != std::string::npos);
      CHECK(what.find("'x'") != std::string::npos);
    }
  }

  TEST_CASE("fixture supercell audit") {
    const auto c = parse_structure(test::read_fixture("ground.struct"));
    CHECK(c.size() == 513);
    CHECK(c.charge == 0);
    int si = 0, carbon = -1;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c.atoms[i].species == "Si") ++si;
      if (c.atoms[i].species == "C") carbon = static_cast<int>(i);
    }
    CHECK(si == 512);
    REQUIRE(carbon >= 0);
    // Dumbbell partner along [001] at 1.75 Å; every other atom farther.
    double nearest = 1e9;
    Vec3 dir = Vec3::Zero();
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (static_cast<int>(i) == carbon) continue;
      const Vec3 d = c.atoms[i].position - c.atoms[static_cast<std::size_t>(carbon)].position;
      if (d.norm() < nearest) {
        nearest = d.norm();
        dir = d.normalized();
      }
    }
    CHECK(nearest == doctest::Approx(1.75).epsilon(1e-12));
    CHECK(std::abs(dir.z()) == doctest::Approx(1.0));
  }

  TEST_CASE("phonon basics") {
    const auto b = parse_phonons("phonons 1 1\nmode 1 40\n1 0 0\n");
    CHECK(b.size() == 1);
    CHECK(b.energies_mev[0] == 40.0);

    CHECK(throws_code([] { parse_phonons("phonons 1 2\nmode 1 40\n1 0 0\nmode 2 41\n1 0 0\n"); },
                      ErrorCode::NonOrthonormal));
    CHECK(throws_code([] { parse_phonons("phonons 1 1\nmode 1 -3\n1 0 0\n"); },
                      ErrorCode::ImaginaryMode));
    CHECK(throws_code([] { parse_phonons("phonons 2 1\nmode 1 40\n1 0 0\n"); },
                      ErrorCode::DimensionMismatch));
    CHECK(throws_code([] { parse_phonons("phonons 1 1\nmode 1 40\n1 0\n"); },
                      ErrorCode::DimensionMismatch));
    CHECK(throws_code([] { parse_phonons("phonons 1 4\nmode 1 40\n1 0 0\n"); },
                      ErrorCode::DimensionMismatch));
    CHECK(throws_code([] { parse_phonons("phonons 1 1\nmode 1 inf\n1 0 0\n"); },
                      ErrorCode::NonFiniteValue));
  }

  TEST_CASE("diatomic spring model") {
    // Bond along x, spring k in eV/Å². Oracle: the 6x6 mass-weighted Hessian.
    const double k = 10.0, m1 = 28.0855, m2 = 12.011;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(6, 6);
    h(0, 0) = k / m1;
    h(3, 3) = k / m2;
    h(0, 3) = h(3, 0) = -k / std::sqrt(m1 * m2);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);

    namespace c = dpk::constants;
    const double to_mev = c::hbar * std::sqrt(c::ev / (c::angstrom * c::angstrom) / c::atomic_mass_unit) / c::mev;
    std::ostringstream s;
    s.precision(17);
    s << "phonons 2 6\n";
    for (int m = 0; m < 6; ++m) {
      const double lambda = std::max(0.0, es.eigenvalues()[m]);
      s << "mode " << m + 1 << " " << (lambda < 1e-12 ? 0.0 : to_mev * std::sqrt(lambda)) << "\n";
      for (int a = 0; a < 2; ++a)
        s << es.eigenvectors()(3 * a, m) << " " << es.eigenvectors()(3 * a + 1, m) << " "
          << es.eigenvectors()(3 * a + 2, m) << "\n";
    }
    const auto b = parse_phonons(s.str());
    CHECK(b.size() == 6);
    CHECK(b.zero_mode_count() == 5);
    const double mu = m1 * m2 / (m1 + m2);
    CHECK(b.energies_mev[5] == doctest::Approx(to_mev * std::sqrt(k / mu)).epsilon(1e-12));
    for (std::size_t m = 0; m < 5; ++m) CHECK(b.is_zero_mode(m));
    CHECK_FALSE(b.is_zero_mode(5));
  }

  TEST_CASE("grid error classes") {
    CHECK(throws_code([] { parse_grid(grid_text(2, 2, 2, "spin_density", 2, "0 0 0 0 0 0 0 0\n")); },
                      ErrorCode::NormalizationError));
    CHECK(throws_code([] { parse_grid(grid_text(2, 2, 2, "spin_density", 2, "1 1 1 1 1 1 1\n")); },
                      ErrorCode::CountMismatch));
    CHECK(throws_code([] { parse_grid(grid_text(2, 2, 2, "spin_density", 2, "1 1 1 1 1 1 1 1 1\n")); },
                      ErrorCode::CountMismatch));
    CHECK(throws_code([] { parse_grid(grid_text(2, 2, 2, "spin_density", 2, "0.25 0.25 0.25 nan 0.25 0.25 0.25 0.25\n")); },
                      ErrorCode::NonFiniteValue));
    CHECK(throws_code([] { parse_grid(grid_text(1, 2, 2, "spin_density", 2, "1 1 1 1\n")); },
                      ErrorCode::MalformedLine));
    CHECK(throws_code([] { parse_grid(grid_text(2, 2, 2, "density", 2, "1 1 1 1 1 1 1 1\n")); },
                      ErrorCode::MalformedLine));
  }

  TEST_CASE("grid normalization ladder") {
    // 8 voxels of volume 1 summing to 2 · (1 + δ).
    auto with = [](double scale) {
      std::string body;
      for (int i = 0; i < 8; ++i) body += text::shortest(0.25 * scale) + " ";
      return grid_text(2, 2, 2, "spin_density", 2, body + "\n");
    };
    Warnings w;
    parse_grid(with(1.01), &w);
    CHECK(w.empty());
    parse_grid(with(1.03), &w);
    CHECK(w.size() == 1);
    CHECK(throws_code([&] { parse_grid(with(1.06)); }, ErrorCode::NormalizationError));
  }

  TEST_CASE("grid index order") {
    auto f = test::cube(FieldKind::SpinDensity, 0.0, 4, 1.0);
    f.counts = {3, 4, 5};
    f.values.assign(60, 0.0);
    for (std::size_t ix = 0; ix < 3; ++ix)
      for (std::size_t iy = 0; iy < 4; ++iy)
        for (std::size_t iz = 0; iz < 5; ++iz)
          f.values[f.index(ix, iy, iz)] = static_cast<double>(ix * 10000 + iy * 100 + iz);
    // Skip the normalization check: the pattern is not a density.
    GridParseOptions loose;
    loose.error_fraction = 1e300;
    loose.warn_fraction = 1e300;
    const auto g = parse_grid(serialize(f), nullptr, loose);
    for (std::size_t ix = 0; ix < 3; ++ix)
      for (std::size_t iy = 0; iy < 4; ++iy)
        for (std::size_t iz = 0; iz < 5; ++iz)
          CHECK(g.at(ix, iy, iz) == static_cast<double>(ix * 10000 + iy * 100 + iz));
    // iz fastest in the body text.
    const std::string text = serialize(f);
    const auto body = text.substr(text.find("axis3"));
    CHECK(body.find("0 1 2 3 4") != std::string::npos);
  }

  TEST_CASE("64 cubed Gaussian orbital") {
    auto f = test::cube(FieldKind::Orbital, 1.0, 64, 0.15);
    const double alpha = 0.8;
    const double norm = std::pow(2.0 * alpha / M_PI, 0.75);
    test::fill(f, [&](const Vec3& r) { return norm * std::exp(-alpha * r.squaredNorm()); });
    Warnings w;
    const auto g = parse_grid(serialize(f), &w);
    CHECK(w.empty());
    CHECK(g.measured_norm() == doctest::Approx(1.0).epsilon(0.02));
  }

  TEST_CASE("manifest basics") {
    const auto m = parse_manifest(kMinimalManifest);
    CHECK(m.entries.size() == 1);
    CHECK(m.gap() == 1.0);

    CHECK(throws_code([] { parse_manifest("bulk_energy = 0\ne_v = 1\ne_c = 0.5\nentry X charge=0 energy=0\n"); },
                      ErrorCode::GapInverted));
    CHECK(throws_code([] { parse_manifest("e_v = 0\ne_c = 1\nentry X charge=0 energy=0\n"); },
                      ErrorCode::MissingKey));
    CHECK(throws_code([] { parse_manifest("bulk_energy = 0\ne_v = 0\ne_c = 1\n"); },
                      ErrorCode::MissingKey));
    CHECK(throws_code([] { parse_manifest(std::string(kMinimalManifest) + "  level 0.5 occ=2.5 kweight=1\n"); },
                      ErrorCode::InvalidOccupation));
    CHECK(throws_code([] { parse_manifest(std::string(kMinimalManifest) + "  level 0.5 occ=1 kweight=0.4\n"); },
                      ErrorCode::InvalidOccupation));
    CHECK(throws_code([] { parse_manifest("bulk_energy = nan\ne_v = 0\ne_c = 1\nentry X charge=0 energy=0\n"); },
                      ErrorCode::NonFiniteValue));
    CHECK(throws_code([] { parse_manifest("bulk_energy 0\ne_v = 0\ne_c = 1\nentry X charge=0 energy=0\n"); },
                      ErrorCode::MalformedLine));
  }

  TEST_CASE("table fixture manifest") {
    const auto m = parse_manifest(test::read_fixture("manifest.txt"));
    CHECK(m.entries.size() == 3);
    CHECK(m.gap() == doctest::Approx(1.16).epsilon(1e-12));
    CHECK(m.metadata.at("encut_density_ev") == "840");
    CHECK(m.metadata.at("encut_wavefunction_ev") == "420");
  }

  TEST_CASE("round trip is byte-identical on canonical fixtures") {
    for (const char* name : {"ground.struct", "excited.struct"}) {
      const auto t = test::read_fixture(name);
      CHECK(serialize(parse_structure(t)) == t);
    }
    {
      const auto t = test::read_fixture("phonons.txt");
      CHECK(serialize(parse_phonons(t)) == t);
    }
    for (const char* name : {"spin_density.grid", "triplet_density.grid", "orbital_i.grid",
                             "orbital_f.grid"}) {
      const auto t = test::read_fixture(name);
      CHECK(serialize(parse_grid(t)) == t);
    }
    // The shipped manifest carries comments; its canonical form is a fixed point.
    const auto canon = serialize(parse_manifest(test::read_fixture("manifest.txt")));
    CHECK(serialize(parse_manifest(canon)) == canon);
  }
}
