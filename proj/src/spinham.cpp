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

#include "dpk/spinham.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dpk/constants.hpp"
#include "dpk/error.hpp"
#include "dpk/kernels.hpp"
#include "dpk/text_io.hpp"

namespace dpk::spinham {

namespace c = dpk::constants;

namespace {

constexpr double kMaxFieldMt = 1000.0;
constexpr double kLevelTolerance = 1e-6;  // MHz
constexpr double kForbidden = 1e-6;

// Eigenpairs of a symmetric matrix ordered by |λ| ascending.
void principal_frame(const Mat3& t, Vec3& values, Mat3& axes) {
  Eigen::SelfAdjointEigenSolver<Mat3> solver(0.5 * (t + t.transpose()));
  std::array<int, 3> order{0, 1, 2};
  const Vec3 ev = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return std::abs(ev[a]) < std::abs(ev[b]); });
  for (int k = 0; k < 3; ++k) {
    values[k] = ev[order[k]];
    axes.col(k) = solver.eigenvectors().col(order[k]);
  }
  if (axes.determinant() < 0.0) axes.col(0) = -axes.col(0);
}

std::vector<kernels::WeightedPoint> to_points(std::span<const PointSpin> spins) {
  std::vector<kernels::WeightedPoint> pts;
  pts.reserve(spins.size());
  for (const auto& s : spins) pts.push_back({s.position, s.weight});
  return pts;
}

void check_point_spin_total(std::span<const PointSpin> spins) {
  double total = 0.0;
  for (const auto& s : spins) total += s.weight;
  if (std::abs(total - 2.0) > 0.05 * 2.0)
    throw Error(ErrorCode::WrongTotalSpin,
                "point-spin weights sum to " + text::shortest(total) + ", a triplet needs 2");
}

// Half the double sum over ordered pairs, (C/4)·Σ_{i≠j} = (C/2)·Σ_{i<j}.
constexpr double kZfsPrefactor = 0.5 * c::electron_dipolar_mhz_a3;

double voxel_diagonal(const ScalarField& f) {
  return (f.axes.row(0) + f.axes.row(1) + f.axes.row(2)).norm();
}

std::vector<kernels::WeightedPoint> grid_points(const ScalarField& f) {
  double peak = 0.0;
  for (double v : f.values) peak = std::max(peak, std::abs(v));
  const double floor = 1e-10 * peak;
  const double dv = f.voxel_volume();
  std::vector<kernels::WeightedPoint> pts;
  for (std::size_t ix = 0; ix < f.counts[0]; ++ix)
    for (std::size_t iy = 0; iy < f.counts[1]; ++iy)
      for (std::size_t iz = 0; iz < f.counts[2]; ++iz) {
        const double v = f.at(ix, iy, iz);
        if (std::abs(v) <= floor) continue;
        pts.push_back({f.position(ix, iy, iz), v * dv});
      }
  return pts;
}

// Block-averaged grid with twice the step; trailing odd planes are dropped.
ScalarField coarsen(const ScalarField& f) {
  ScalarField g;
  g.kind = f.kind;
  g.expected_norm = f.expected_norm;
  g.axes = 2.0 * f.axes;
  g.origin = f.origin + 0.5 * (f.axes.row(0) + f.axes.row(1) + f.axes.row(2)).transpose();
  for (int k = 0; k < 3; ++k) g.counts[k] = f.counts[k] / 2;
  g.values.assign(g.counts[0] * g.counts[1] * g.counts[2], 0.0);
  for (std::size_t ix = 0; ix < g.counts[0]; ++ix)
    for (std::size_t iy = 0; iy < g.counts[1]; ++iy)
      for (std::size_t iz = 0; iz < g.counts[2]; ++iz) {
        double s = 0.0;
        for (std::size_t a = 0; a < 2; ++a)
          for (std::size_t b = 0; b < 2; ++b)
            for (std::size_t d = 0; d < 2; ++d) s += f.at(2 * ix + a, 2 * iy + b, 2 * iz + d);
        g.values[g.index(ix, iy, iz)] = s / 8.0;
      }
  return g;
}

Mat3 grid_zfs_tensor(const ScalarField& f) {
  const auto pts = grid_points(f);
  return kZfsPrefactor * kernels::dipolar_pair_sum(pts, voxel_diagonal(f) * (1.0 + 1e-9));
}

}  // namespace

ZfsTensor ZfsTensor::from_tensor(const Mat3& tensor) {
  ZfsTensor z;
  z.tensor = 0.5 * (tensor + tensor.transpose());
  principal_frame(z.tensor, z.principal, z.axes);
  z.d_mhz = 1.5 * z.principal[2];
  z.e_mhz = 0.5 * std::abs(z.principal[0] - z.principal[1]);
  return z;
}

ZfsTensor ZfsTensor::from_de(double d_mhz, double e_mhz) {
  Mat3 t = Mat3::Zero();
  t(0, 0) = -d_mhz / 3.0 + e_mhz;
  t(1, 1) = -d_mhz / 3.0 - e_mhz;
  t(2, 2) = 2.0 * d_mhz / 3.0;
  ZfsTensor z;
  z.tensor = t;
  z.d_mhz = d_mhz;
  z.e_mhz = e_mhz;
  z.principal = t.diagonal();
  z.axes = Mat3::Identity();
  return z;
}

ZfsTensor zfs_from_point_spins(std::span<const PointSpin> spins) {
  check_point_spin_total(spins);
  const auto pts = to_points(spins);
  return ZfsTensor::from_tensor(kZfsPrefactor * kernels::dipolar_pair_sum(pts, 0.0));
}

ZfsTensor zfs_from_point_spins_serial(std::span<const PointSpin> spins) {
  check_point_spin_total(spins);
  const auto pts = to_points(spins);
  return ZfsTensor::from_tensor(kZfsPrefactor * kernels::serial::dipolar_pair_sum(pts, 0.0));
}

ZfsTensor zfs_from_spin_density(const ScalarField& rho, const ZfsGridOptions& options) {
  if (rho.kind != FieldKind::SpinDensity)
    throw Error(ErrorCode::KindMismatch, "ZFS needs a spin-density grid");
  const double measured = rho.measured_norm();
  if (std::abs(rho.expected_norm - 2.0) > 1e-9 || std::abs(measured - 2.0) > 0.05 * 2.0) {
    throw Error(ErrorCode::WrongTotalSpin, "spin density integrates to " +
                                               text::shortest(measured) + " with declared 2S = " +
                                               text::shortest(rho.expected_norm) +
                                               ", a triplet needs 2");
  }
  const Mat3 fine = grid_zfs_tensor(rho);
  ZfsTensor z = ZfsTensor::from_tensor(fine);

  if (options.estimate_error) {
    if (std::min({rho.counts[0], rho.counts[1], rho.counts[2]}) < 4)
      throw Error(ErrorCode::GridTooCoarse, "grid needs at least 4 points per axis");
    const Mat3 coarse = grid_zfs_tensor(coarsen(rho));
    Mat3 cell;
    for (int k = 0; k < 3; ++k)
      cell.row(k) = static_cast<double>(rho.counts[static_cast<std::size_t>(k)]) * rho.axes.row(k);
    const double length = std::cbrt(std::abs(cell.determinant()));
    const double natural = c::electron_dipolar_mhz_a3 * measured * measured /
                           (length * length * length);
    const double scale = std::max(fine.norm(), natural);
    z.discretization_error = (fine - coarse).norm() / 3.0 / scale;
    if (z.discretization_error > options.max_error) {
      throw Error(ErrorCode::GridTooCoarse,
                  "estimated ZFS discretization error " +
                      text::sig6(100.0 * z.discretization_error) + "% exceeds " +
                      text::sig6(100.0 * options.max_error) + "%");
    }
  }
  return z;
}

std::optional<double> nuclear_g_factor(std::string_view isotope) {
  if (isotope == "1H") return 5.5856946893;
  if (isotope == "13C") return 1.40482;
  if (isotope == "29Si") return -1.11058;
  return std::nullopt;
}

std::optional<double> interpolate(const ScalarField& f, const Vec3& point) {
  // Solve origin + Σ f_k a_k = point for fractional voxel coordinates.
  const Vec3 frac = f.axes.transpose().fullPivLu().solve(point - f.origin);
  std::array<std::size_t, 3> lo{};
  std::array<double, 3> t{};
  for (int k = 0; k < 3; ++k) {
    const auto n = f.counts[static_cast<std::size_t>(k)];
    const double top = static_cast<double>(n - 1);
    const double tol = 1e-9 * std::max(1.0, top);
    if (frac[k] < -tol || frac[k] > top + tol) return std::nullopt;
    const double x = std::clamp(frac[k], 0.0, top);
    std::size_t i = static_cast<std::size_t>(std::floor(x));
    if (n > 1 && i >= n - 1) i = n - 2;
    lo[static_cast<std::size_t>(k)] = i;
    t[static_cast<std::size_t>(k)] = n > 1 ? x - static_cast<double>(i) : 0.0;
  }
  double value = 0.0;
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t d = 0; d < 2; ++d) {
        const double w = (a ? t[0] : 1.0 - t[0]) * (b ? t[1] : 1.0 - t[1]) *
                         (d ? t[2] : 1.0 - t[2]);
        if (w == 0.0) continue;
        value += w * f.at(lo[0] + a, lo[1] + b, lo[2] + d);
      }
  return value;
}

HyperfineTensor hyperfine_from_spin_density(const ScalarField& rho, const Nucleus& nucleus,
                                            const HyperfineOptions& options) {
  if (rho.kind != FieldKind::SpinDensity)
    throw Error(ErrorCode::KindMismatch, "hyperfine needs a spin-density grid");
  const double two_s = rho.expected_norm;
  if (std::abs(two_s - 1.0) > 1e-9 && std::abs(two_s - 2.0) > 1e-9)
    throw Error(ErrorCode::WrongTotalSpin,
                "declared 2S = " + text::shortest(two_s) + ", expected 1 or 2");

  const auto contact = interpolate(rho, nucleus.position);
  if (!contact) {
    throw Error(ErrorCode::NucleusOutsideGrid,
                nucleus.species + " at (" + text::shortest(nucleus.position.x()) + ", " +
                    text::shortest(nucleus.position.y()) + ", " +
                    text::shortest(nucleus.position.z()) + ") Å");
  }

  double smallest_extent = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k)
    smallest_extent = std::min(smallest_extent, static_cast<double>(rho.counts[static_cast<std::size_t>(k)]) *
                                                    rho.axes.row(k).norm());
  const double radius =
      options.exclusion_radius > 0.0 ? options.exclusion_radius : 0.5 * voxel_diagonal(rho);
  if (radius > 0.25 * smallest_extent) {
    throw Error(ErrorCode::ExclusionRadiusTooLarge,
                text::shortest(radius) + " Å exceeds a quarter of the smallest cell extent " +
                    text::shortest(smallest_extent) + " Å");
  }

  const double coupling = c::electron_nuclear_dipolar_mhz_a3 * nucleus.g_factor / two_s;
  HyperfineTensor h;
  h.nucleus = nucleus;
  h.a_iso_mhz = 8.0 * c::pi / 3.0 * coupling * *contact;
  const auto pts = grid_points(rho);
  h.dipolar = coupling * kernels::dipolar_field_sum(pts, nucleus.position, radius);
  h.dipolar = 0.5 * (h.dipolar + h.dipolar.transpose());
  h.tensor = h.a_iso_mhz * Mat3::Identity() + h.dipolar;
  Mat3 axes;
  principal_frame(h.tensor, h.principal, axes);
  return h;
}

const SpinMatrices& spin_one() {
  static const SpinMatrices m = [] {
    using cd = std::complex<double>;
    const double r = std::sqrt(2.0);
    Eigen::Matrix3cd plus = Eigen::Matrix3cd::Zero();  // S+|−1⟩ = √2|0⟩, S+|0⟩ = √2|+1⟩
    plus(1, 0) = r;
    plus(2, 1) = r;
    const Eigen::Matrix3cd minus = plus.adjoint();
    SpinMatrices s;
    s.x = 0.5 * (plus + minus);
    s.y = (plus - minus) / cd(0.0, 2.0);
    s.z = Eigen::Matrix3cd::Zero();
    s.z(0, 0) = -1.0;
    s.z(2, 2) = 1.0;
    return s;
  }();
  return m;
}

SpinLevelSet triplet_levels(const ZfsTensor& zfs, const Vec3& field_mt,
                            std::span<const NuclearSpinState> nuclei) {
  if (!(field_mt.norm() < kMaxFieldMt))
    throw Error(ErrorCode::FieldTooLarge,
                "|B| = " + text::shortest(field_mt.norm()) + " mT, limit 1000 mT");
  const SpinMatrices& s = spin_one();
  const std::array<const Eigen::Matrix3cd*, 3> op{&s.x, &s.y, &s.z};

  Eigen::Matrix3cd h = Eigen::Matrix3cd::Zero();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) h += zfs.tensor(a, b) * (*op[a]) * (*op[b]);
  for (int a = 0; a < 3; ++a) {
    double coeff = c::electron_zeeman_mhz_per_mt * field_mt[a];
    for (const auto& n : nuclei) coeff += n.m_i * n.a_mhz(a, 2);
    h += coeff * (*op[a]);
  }
  h = 0.5 * (h + h.adjoint()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> solver(h);
  SpinLevelSet out;
  out.energies_mhz = solver.eigenvalues();
  out.vectors = solver.eigenvectors();
  out.field_mt = field_mt;
  return out;
}

std::vector<OdmrLine> odmr_frequencies(const SpinLevelSet& levels) {
  const SpinMatrices& s = spin_one();
  std::vector<OdmrLine> raw;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const double f = levels.energies_mhz[j] - levels.energies_mhz[i];
      if (!(f > kLevelTolerance)) continue;
      const auto vi = levels.vectors.col(i);
      const auto vj = levels.vectors.col(j);
      const double mx = std::abs(vj.dot(s.x * vi));
      const double my = std::abs(vj.dot(s.y * vi));
      raw.push_back({f, std::sqrt(mx * mx + my * my), false, i, j});
    }
  std::stable_sort(raw.begin(), raw.end(),
                   [](const OdmrLine& a, const OdmrLine& b) { return a.frequency_mhz < b.frequency_mhz; });

  std::vector<OdmrLine> out;
  for (const auto& line : raw) {
    if (!out.empty() && line.frequency_mhz - out.back().frequency_mhz <= kLevelTolerance) {
      auto& m = out.back();
      m.intensity = std::hypot(m.intensity, line.intensity);
      continue;
    }
    out.push_back(line);
  }
  for (auto& line : out) line.allowed = line.intensity >= kForbidden;
  return out;
}

double isotope_risk(std::span<const int> shell_site_counts, double abundance) {
  if (!(abundance >= 0.0 && abundance <= 1.0))
    throw Error(ErrorCode::NonPhysicalInput,
                "abundance " + text::shortest(abundance) + " outside [0, 1]");
  long long sites = 0;
  for (int n : shell_site_counts) {
    if (n < 0) throw Error(ErrorCode::NonPhysicalInput, "negative site count");
    sites += n;
  }
  if (sites == 0) return 0.0;
  if (abundance == 1.0) return 1.0;
  return -std::expm1(static_cast<double>(sites) * std::log1p(-abundance));
}

}  // namespace dpk::spinham
