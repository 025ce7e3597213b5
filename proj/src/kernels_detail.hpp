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

#ifndef DPK_SRC_KERNELS_DETAIL_HPP
#define DPK_SRC_KERNELS_DETAIL_HPP

// Per-element bodies shared by the serial and OpenMP kernels.

#include <cmath>
#include <complex>
#include <span>

#include "dpk/kernels.hpp"

namespace dpk::kernels::detail {

// (r²·I − 3·r·rᵀ)/r⁵
inline Mat3 pair_kernel(const Vec3& r, double r2) {
  const double inv_r5 = 1.0 / (r2 * r2 * std::sqrt(r2));
  return (r2 * Mat3::Identity() - 3.0 * r * r.transpose()) * inv_r5;
}

// (3·n·nᵀ − I)/d³ = (3·d·dᵀ − d²·I)/d⁵
inline Mat3 field_kernel(const Vec3& d, double d2) {
  const double inv_d5 = 1.0 / (d2 * d2 * std::sqrt(d2));
  return (3.0 * d * d.transpose() - d2 * Mat3::Identity()) * inv_d5;
}

inline std::complex<double> correlation_at(std::span<const ModeTerm> modes, double t,
                                           double envelope_sigma) {
  double re = 0.0, im = 0.0;
  for (const auto& k : modes) {
    const double c = std::cos(k.energy * t);
    const double s = std::sin(k.energy * t);
    // (n+1) e^{-iωt} + n e^{iωt} = (2n+1) cos ωt − i sin ωt
    re += k.s * (2.0 * k.occupation + 1.0) * c;
    im -= k.s * s;
  }
  const double envelope = std::exp(-0.5 * envelope_sigma * envelope_sigma * t * t);
  return {re * envelope, im * envelope};
}

}  // namespace dpk::kernels::detail

#endif  // DPK_SRC_KERNELS_DETAIL_HPP
