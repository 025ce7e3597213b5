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

// Reference implementations. Keep these as plain as possible: they are what
// the OpenMP kernels are tested against.

#include <cmath>

#include "dpk/kernels.hpp"
#include "kernels_detail.hpp"

namespace dpk::kernels::serial {

Mat3 dipolar_pair_sum(std::span<const WeightedPoint> points, double cutoff) {
  Mat3 total = Mat3::Zero();
  const double cutoff2 = cutoff * cutoff;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const Vec3 r = points[i].r - points[j].r;
      const double r2 = r.squaredNorm();
      if (r2 <= cutoff2) continue;
      total += points[i].w * points[j].w * detail::pair_kernel(r, r2);
    }
  }
  return total;
}

Mat3 dipolar_field_sum(std::span<const WeightedPoint> points, const Vec3& center,
                       double cutoff) {
  Mat3 total = Mat3::Zero();
  const double cutoff2 = cutoff * cutoff;
  for (const auto& p : points) {
    const Vec3 d = p.r - center;
    const double d2 = d.squaredNorm();
    if (d2 <= cutoff2) continue;
    total += p.w * detail::field_kernel(d, d2);
  }
  return total;
}

Moments moments(std::span<const WeightedPoint> points) {
  Moments m;
  for (const auto& p : points) {
    m.weight += p.w;
    m.first += p.w * p.r;
  }
  return m;
}

void mode_correlation(std::span<const ModeTerm> modes, std::span<const double> times,
                      double envelope_sigma, std::span<std::complex<double>> out) {
  for (std::size_t m = 0; m < times.size(); ++m) {
    out[m] = detail::correlation_at(modes, times[m], envelope_sigma);
  }
}

}  // namespace dpk::kernels::serial
