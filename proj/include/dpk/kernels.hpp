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

#ifndef DPK_KERNELS_HPP
#define DPK_KERNELS_HPP

/// @file kernels.hpp
/// Data-parallel inner loops. Every kernel exists twice:
///
///   dpk::kernels::serial::f  plain loops, the reference for tests
///   dpk::kernels::f          OpenMP
///
/// The OpenMP versions accumulate into fixed partitions (per item or per
/// fixed-size block) that are summed in index order afterwards, so their
/// output does not depend on the thread count. They agree with the serial
/// reference to rounding (~1e-12 relative).

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dpk::kernels {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct WeightedPoint {
  Vec3 r;
  double w;
};

struct Moments {
  double weight = 0.0;      // Σ w
  Vec3 first = Vec3::Zero();  // Σ w r
};

/// A phonon mode as seen by the generating function: energy (meV), partial
/// Huang-Rhys factor, thermal occupation.
struct ModeTerm {
  double energy;
  double s;
  double occupation;
};

namespace serial {

Mat3 dipolar_pair_sum(std::span<const WeightedPoint> points, double cutoff);
Mat3 dipolar_field_sum(std::span<const WeightedPoint> points, const Vec3& center,
                       double cutoff);
Moments moments(std::span<const WeightedPoint> points);
void mode_correlation(std::span<const ModeTerm> modes, std::span<const double> times,
                      double envelope_sigma, std::span<std::complex<double>> out);

}  // namespace serial

/// Σ_{i<j} w_i w_j (r²·I − 3·r·rᵀ)/r⁵ with r = r_i − r_j; pairs closer than
/// `cutoff` are skipped.
Mat3 dipolar_pair_sum(std::span<const WeightedPoint> points, double cutoff);

/// Σ_i w_i (3·n·nᵀ − I)/d³ with d = |r_i − center|, n the unit vector;
/// points with d ≤ cutoff are skipped.
Mat3 dipolar_field_sum(std::span<const WeightedPoint> points, const Vec3& center,
                       double cutoff);

Moments moments(std::span<const WeightedPoint> points);

/// out[m] = Σ_k s_k [(n_k+1) e^(−iω_k t_m) + n_k e^(iω_k t_m)] · e^(−σ²t_m²/2),
/// with ω in meV and t in ħ/meV.
void mode_correlation(std::span<const ModeTerm> modes, std::span<const double> times,
                      double envelope_sigma, std::span<std::complex<double>> out);

/// Threads the OpenMP kernels will use.
int thread_count();

}  // namespace dpk::kernels

#endif  // DPK_KERNELS_HPP
