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
#include <vector>

#include "doctest.h"
#include "dpk/constants.hpp"
#include "dpk/spinham.hpp"
#include "support.hpp"

using namespace dpk;
using namespace dpk::spinham;
using dpk::test::throws_code;

namespace {

namespace c = dpk::constants;

// CODATA 2018 mu0 / 4pi; differs from 1e-7 by a few parts in 1e10.
constexpr double kMu0Over4Pi = 1.25663706212e-6 / (4.0 * M_PI);

// (μ0/4π)(g_e μ_B)²/h in MHz·Å³, evaluated here from raw CODATA values.
double electron_dipolar() {
  const double gmu = c::electron_g * c::bohr_magneton;
  return kMu0Over4Pi * gmu * gmu / c::planck / 1e6 / std::pow(c::angstrom, 3);
}

// (μ0/4π) g_e μ_B μ_N / h in MHz·Å³; multiply by g_N.
double electron_nuclear_dipolar() {
  return kMu0Over4Pi * c::electron_g * c::bohr_magneton * c::nuclear_magneton / c::planck / 1e6 /
         std::pow(c::angstrom, 3);
}

Mat3 point_dipole(const Vec3& d) {
  const double r = d.norm();
  return (3.0 * d * d.transpose() - d.squaredNorm() * Mat3::Identity()) / std::pow(r, 5);
}

double scale(const Mat3& m) { return m.cwiseAbs().maxCoeff(); }

ScalarField gaussian_pair(double h, double half_extent) {
  const auto n = static_cast<std::size_t>(std::lround(2 * half_extent / h)) + 1;
  auto f = test::cube(FieldKind::SpinDensity, 2.0, n, h);
  test::fill(f, [](const Vec3& r) {
    return test::gaussian_density(r, Vec3(0, 0, -1.3), 0.5, 1.0) +
           test::gaussian_density(r, Vec3(0, 0, 1.3), 0.5, 1.0);
  });
  return f;
}

ScalarField p_lobes(double h) {
  const auto n = static_cast<std::size_t>(std::lround(8.0 / h)) + 1;
  auto f = test::cube(FieldKind::SpinDensity, 2.0, n, h);
  const Vec3 a(0, 0, -0.875), b(0, 0, 0.875);
  // Normalized p lobes: x² exp(-r²/w) integrates to (π w)^{3/2} w/2.
  auto p = [](const Vec3& d, int axis, double w) {
    return d[axis] * d[axis] * std::exp(-d.squaredNorm() / w) / (std::pow(M_PI * w, 1.5) * w / 2);
  };
  test::fill(f, [&](const Vec3& r) { return p(r - a, 0, 1.5) + p(r - b, 1, 2.5); });
  return f;
}

}  // namespace

TEST_SUITE("spinham") {
  TEST_CASE("constants agree with a from-scratch evaluation") {
    CHECK(c::electron_dipolar_mhz_a3 == doctest::Approx(electron_dipolar()).epsilon(1e-12));
    CHECK(c::electron_nuclear_dipolar_mhz_a3 ==
          doctest::Approx(electron_nuclear_dipolar()).epsilon(1e-12));
  }

  TEST_CASE("two point spins 1 nm apart") {
    const std::vector<PointSpin> s{{Vec3::Zero(), 1.0}, {Vec3(0, 0, 10), 1.0}};
    const auto z = zfs_from_point_spins(s);
    const double k = electron_dipolar() / 1000.0;  // r = 10 Å
    CHECK(z.tensor(2, 2) == doctest::Approx(-k).epsilon(1e-6));
    CHECK(z.tensor(0, 0) == doctest::Approx(0.5 * k).epsilon(1e-6));
    CHECK(k == doctest::Approx(52.0).epsilon(0.01));
    CHECK(z.e_mhz < 1e-9);
    CHECK(z.d_mhz == doctest::Approx(-1.5 * k).epsilon(1e-6));
    CHECK(zfs_from_point_spins_serial(s).d_mhz == doctest::Approx(z.d_mhz).epsilon(1e-12));
  }

  TEST_CASE("ZFS rotation covariance") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-3.0, 3.0), w(0.1, 1.0);
    std::vector<PointSpin> s;
    double total = 0.0;
    for (int i = 0; i < 12; ++i) {
      s.push_back({Vec3(u(rng), u(rng), u(rng)), w(rng)});
      total += s.back().weight;
    }
    for (auto& p : s) p.weight *= 2.0 / total;
    const auto ref = zfs_from_point_spins(s);
    CHECK(ref.e_mhz / std::abs(ref.d_mhz) <= 1.0 / 3.0 + 1e-12);
    for (int trial = 0; trial < 100; ++trial) {
      const Mat3 r = test::random_rotation(rng);
      auto moved = s;
      for (auto& p : moved) p.position = r * p.position;
      const auto z = zfs_from_point_spins(moved);
      const double norm = ref.tensor.norm();
      CHECK((z.tensor - r * ref.tensor * r.transpose()).norm() <= 1e-6 * norm);
      CHECK((z.tensor - z.tensor.transpose()).norm() <= 1e-9 * norm);
      CHECK(std::abs(z.tensor.trace()) < 1e-6 * norm);
      CHECK(std::abs(z.d_mhz - ref.d_mhz) < 1e-6);
      CHECK(std::abs(z.e_mhz - ref.e_mhz) < 1e-6);
    }
  }

  TEST_CASE("ZFS input errors") {
    const std::vector<PointSpin> one{{Vec3::Zero(), 0.5}, {Vec3(0, 0, 3), 0.5}};
    CHECK(throws_code([&] { zfs_from_point_spins(one); }, ErrorCode::WrongTotalSpin));
    auto f = gaussian_pair(0.5, 4.0);
    f.expected_norm = 1.0;
    CHECK(throws_code([&] { zfs_from_spin_density(f); }, ErrorCode::WrongTotalSpin));
    auto tiny = test::cube(FieldKind::SpinDensity, 2.0, 3, 1.0);
    tiny.values.assign(27, 2.0 / 27.0);
    CHECK(throws_code([&] { zfs_from_spin_density(tiny); }, ErrorCode::GridTooCoarse));
    CHECK(throws_code([] { zfs_from_spin_density(p_lobes(0.5)); }, ErrorCode::GridTooCoarse));
  }

  TEST_CASE("spherical density has no ZFS") {
    auto f = test::cube(FieldKind::SpinDensity, 2.0, 17, 0.4);
    test::fill(f, [](const Vec3& r) { return test::gaussian_density(r, Vec3::Zero(), 0.7, 2.0); });
    const auto z = zfs_from_spin_density(f);
    CHECK(z.tensor.norm() < 1e-9 * electron_dipolar() / std::pow(0.7, 3));
  }

  TEST_CASE("separated Gaussians reproduce the point-spin tensor and converge") {
    const std::vector<PointSpin> s{{Vec3(0, 0, -1.3), 1.0}, {Vec3(0, 0, 1.3), 1.0}};
    const auto ref = zfs_from_point_spins(s);
    ZfsGridOptions quick;
    quick.estimate_error = false;
    const auto coarse = zfs_from_spin_density(gaussian_pair(0.4, 3.2), quick);
    const auto fine = zfs_from_spin_density(gaussian_pair(0.2, 3.2));
    // Overlapping tails: the continuum oracle is the Hessian of erf(R/2σ)/R.
    const double x = 2.6 / (2 * 0.5);
    const double tail = std::erf(x) - 2 * x / std::sqrt(M_PI) * std::exp(-x * x) * (1 + 2 * x * x / 3);
    CHECK(test::rel(fine.d_mhz, tail * ref.d_mhz) < 0.01);
    CHECK(test::rel(fine.d_mhz, coarse.d_mhz) < 0.02);
    CHECK(fine.discretization_error < 0.05);
  }

  TEST_CASE("orthogonal p lobes are orthorhombic at two resolutions") {
    ZfsGridOptions quick;
    quick.estimate_error = false;
    const auto a = zfs_from_spin_density(p_lobes(0.5), quick);
    const auto b = zfs_from_spin_density(p_lobes(0.25), quick);
    for (const auto& z : {a, b}) {
      CHECK(std::abs(z.d_mhz) > 10.0);
      CHECK(z.e_mhz > 1.0);
      CHECK(z.e_mhz <= std::abs(z.d_mhz) / 3.0 + 1e-9);
      CHECK(std::abs(z.tensor.trace()) < 1e-6 * z.tensor.norm());
    }
    // Mirror planes x = 0 and y = 0: the tensor is diagonal in the lab frame.
    for (const auto& z : {a, b}) {
      const Mat3 off = z.tensor - Mat3(z.tensor.diagonal().asDiagonal());
      CHECK(off.norm() < 1e-9 * z.tensor.norm());
    }
  }

  TEST_CASE("hydrogen 1s hyperfine") {
    const double a0 = c::bohr_radius / c::angstrom;
    auto f = test::cube(FieldKind::SpinDensity, 1.0, 121, 0.05);
    test::fill(f, [&](const Vec3& r) { return std::exp(-2.0 * r.norm() / a0) / (M_PI * a0 * a0 * a0); });
    CHECK(f.measured_norm() == doctest::Approx(1.0).epsilon(0.05));
    const auto h = hyperfine_from_spin_density(f, {"1H", Vec3::Zero(), *nuclear_g_factor("1H")});
    CHECK(h.a_iso_mhz == doctest::Approx(1420.4).epsilon(0.005));
    CHECK(scale(h.dipolar) < 1e-6 * h.a_iso_mhz);
  }

  TEST_CASE("Gaussian on the nucleus: pure contact") {
    auto f = test::cube(FieldKind::SpinDensity, 1.0, 41, 0.1);
    test::fill(f, [](const Vec3& r) { return test::gaussian_density(r, Vec3::Zero(), 0.4, 1.0); });
    const double g = *nuclear_g_factor("13C");
    const auto h = hyperfine_from_spin_density(f, {"13C", Vec3::Zero(), g});
    const double peak = test::gaussian_density(Vec3::Zero(), Vec3::Zero(), 0.4, 1.0);
    CHECK(h.a_iso_mhz == doctest::Approx(8 * M_PI / 3 * electron_nuclear_dipolar() * g * peak).epsilon(1e-9));
    CHECK(scale(h.dipolar) < 1e-9 * h.a_iso_mhz);
  }

  TEST_CASE("mean-value property: distant sphere acts as a point dipole") {
    auto f = test::cube(FieldKind::SpinDensity, 1.0, 61, 0.15);
    const Vec3 center(1.2, 0.9, 1.5);
    test::fill(f, [&](const Vec3& r) { return test::gaussian_density(r, center, 0.35, 1.0); });
    const double g = *nuclear_g_factor("13C");
    const Vec3 nucleus(-1.5, -0.9, -1.2);
    const auto h = hyperfine_from_spin_density(f, {"13C", nucleus, g});
    const Mat3 ref = electron_nuclear_dipolar() * g * point_dipole(center - nucleus);
    CHECK((h.dipolar - ref).norm() <= 0.01 * ref.norm());
    CHECK(std::abs(h.a_iso_mhz) < 1e-6 * ref.norm());
    // Same density declared as half of a triplet: couplings halve.
    auto t = f;
    t.expected_norm = 2.0;
    const auto ht = hyperfine_from_spin_density(t, {"13C", nucleus, g});
    CHECK((ht.dipolar - 0.5 * h.dipolar).norm() <= 1e-12 * ref.norm());
  }

  TEST_CASE("hyperfine converges under resolution doubling") {
    auto make = [](double h) {
      auto f = test::cube(FieldKind::SpinDensity, 1.0, static_cast<std::size_t>(std::lround(6.0 / h)) + 1, h);
      test::fill(f, [](const Vec3& r) {
        const double psi = 0.2 * std::exp(-r.squaredNorm() / 0.5) + r.z() * std::exp(-r.squaredNorm() / 0.8);
        return psi * psi;
      });
      const double s = f.measured_norm();
      for (double& v : f.values) v /= s;
      return f;
    };
    const double g = *nuclear_g_factor("13C");
    const auto a = hyperfine_from_spin_density(make(0.1), {"13C", Vec3::Zero(), g});
    const auto b = hyperfine_from_spin_density(make(0.05), {"13C", Vec3::Zero(), g});
    CHECK((a.tensor - b.tensor).norm() < 0.02 * b.tensor.norm());
  }

  TEST_CASE("fixture C_i(+) density: axial pattern") {
    const auto f = parse_grid(test::read_fixture("spin_density.grid"));
    const double g = *nuclear_g_factor("13C");
    const auto h = hyperfine_from_spin_density(f, {"13C", Vec3::Zero(), g});
    const double axx = h.principal[0], ayy = h.principal[1], azz = h.principal[2];
    CHECK(std::abs(azz) > 5.0 * std::abs(axx));
    CHECK(std::abs(axx - ayy) < 0.01 * std::abs(azz));
    // Same anisotropy ratio as 12.2/169.44 to within a few percent of A_zz.
    CHECK(std::abs(axx / azz - 12.2 / 169.44) < 0.02);
    CHECK(std::abs(h.dipolar.trace()) < 1e-9 * std::abs(azz));
  }

  TEST_CASE("hyperfine input errors") {
    auto f = test::cube(FieldKind::SpinDensity, 1.0, 21, 0.2);
    test::fill(f, [](const Vec3& r) { return test::gaussian_density(r, Vec3::Zero(), 0.5, 1.0); });
    CHECK(throws_code([&] { hyperfine_from_spin_density(f, {"1H", Vec3(5, 0, 0), 5.58}); },
                      ErrorCode::NucleusOutsideGrid));
    HyperfineOptions big;
    big.exclusion_radius = 1.2;
    CHECK(throws_code([&] { hyperfine_from_spin_density(f, {"1H", Vec3::Zero(), 5.58}, big); },
                      ErrorCode::ExclusionRadiusTooLarge));
    auto odd = f;
    odd.expected_norm = 3.0;
    CHECK(throws_code([&] { hyperfine_from_spin_density(odd, {"1H", Vec3::Zero(), 5.58}); },
                      ErrorCode::WrongTotalSpin));
  }

  TEST_CASE("triplet levels") {
    const auto l = triplet_levels(ZfsTensor::from_de(439.3, 37.9));
    CHECK(l.energies_mhz[0] == doctest::Approx(-2 * 439.3 / 3).epsilon(1e-12));
    CHECK(l.energies_mhz[1] == doctest::Approx(439.3 / 3 - 37.9).epsilon(1e-12));
    CHECK(l.energies_mhz[2] == doctest::Approx(439.3 / 3 + 37.9).epsilon(1e-12));
    CHECK(std::abs(l.energies_mhz.sum()) < 1e-6);
    CHECK((l.vectors.adjoint() * l.vectors - Eigen::Matrix3cd::Identity()).norm() < 1e-12);

    const auto zero = triplet_levels(ZfsTensor::from_de(0, 0));
    CHECK(zero.energies_mhz.cwiseAbs().maxCoeff() < 1e-12);

    const double b = 10.0, gz = c::electron_zeeman_mhz_per_mt * b;
    const auto z = triplet_levels(ZfsTensor::from_de(439.3, 0), Vec3(0, 0, b));
    CHECK(z.energies_mhz[0] == doctest::Approx(-2 * 439.3 / 3).epsilon(1e-12));
    CHECK(z.energies_mhz[1] == doctest::Approx(439.3 / 3 - gz).epsilon(1e-12));
    CHECK(z.energies_mhz[2] == doctest::Approx(439.3 / 3 + gz).epsilon(1e-12));
    CHECK(gz == doctest::Approx(c::electron_g * c::bohr_magneton * 1e-2 / c::planck / 1e6).epsilon(1e-12));

    CHECK(throws_code([] { triplet_levels(ZfsTensor::from_de(1, 0), Vec3(0, 0, 1000)); },
                      ErrorCode::FieldTooLarge));
  }

  TEST_CASE("static nuclear configuration shifts m_S = ±1") {
    NuclearSpinState n;
    n.a_mhz = Mat3::Zero();
    n.a_mhz(2, 2) = 20.0;
    n.m_i = 0.5;
    const auto l = triplet_levels(ZfsTensor::from_de(439.3, 0), Vec3::Zero(), std::span(&n, 1));
    CHECK(l.energies_mhz[1] == doctest::Approx(439.3 / 3 - 10.0).epsilon(1e-12));
    CHECK(l.energies_mhz[2] == doctest::Approx(439.3 / 3 + 10.0).epsilon(1e-12));
  }

  TEST_CASE("ODMR lines") {
    const auto lines = odmr_frequencies(triplet_levels(ZfsTensor::from_de(439.3, 37.9)));
    std::vector<double> allowed;
    for (const auto& l : lines)
      if (l.allowed) allowed.push_back(l.frequency_mhz);
    REQUIRE(allowed.size() == 2);
    CHECK(allowed[0] == doctest::Approx(401.4).epsilon(1e-12));
    CHECK(allowed[1] == doctest::Approx(477.2).epsilon(1e-12));

    CHECK(odmr_frequencies(triplet_levels(ZfsTensor::from_de(0, 0))).empty());
    const auto axial = odmr_frequencies(triplet_levels(ZfsTensor::from_de(439.3, 0)));
    REQUIRE(axial.size() == 1);
    CHECK(axial[0].frequency_mhz == doctest::Approx(439.3).epsilon(1e-12));
    CHECK(axial[0].allowed);
  }

  TEST_CASE("isotope risk") {
    const std::vector<int> none{0}, four{4}, two{1, 1};
    CHECK(isotope_risk(four, 0.0) == 0.0);
    CHECK(isotope_risk(four, 0.045) == doctest::Approx(1 - std::pow(0.955, 4)).epsilon(1e-12));
    CHECK(isotope_risk(four, 0.045) == doctest::Approx(0.1681).epsilon(1e-3));
    CHECK(isotope_risk(two, 0.005) == doctest::Approx(0.00998).epsilon(1e-3));
    CHECK(isotope_risk(two, 0.005) < 0.01);
    CHECK(isotope_risk(none, 1.0) == 0.0);
    CHECK(isotope_risk(four, 1.0) == 1.0);
    CHECK(throws_code([&] { isotope_risk(four, 1.5); }, ErrorCode::NonPhysicalInput));
  }
}
