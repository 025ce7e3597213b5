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

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "dpk/kernels.hpp"
#include "kernels_detail.hpp"

namespace dpk::kernels {

namespace {

// Fixed block size for O(n) reductions; independent of the thread count.
constexpr std::size_t kBlock = 4096;

std::size_t block_count(std::size_t n) { return (n + kBlock - 1) / kBlock; }

}  // namespace

int thread_count() { return omp_get_max_threads(); }

Mat3 dipolar_pair_sum(std::span<const WeightedPoint> points, double cutoff) {
  const std::size_t n = points.size();
  const double cutoff2 = cutoff * cutoff;
  // One partial per row i; rows are summed in order below.
  std::vector<Mat3> row(n, Mat3::Zero());
  const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (long long ii = 0; ii < nn; ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    Mat3 acc = Mat3::Zero();
    const Vec3 ri = points[i].r;
    const double wi = points[i].w;
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec3 r = ri - points[j].r;
      const double r2 = r.squaredNorm();
      if (r2 <= cutoff2) continue;
      acc += wi * points[j].w * detail::pair_kernel(r, r2);
    }
    row[i] = acc;
  }
  Mat3 total = Mat3::Zero();
  for (const auto& m : row) total += m;
  return total;
}

Mat3 dipolar_field_sum(std::span<const WeightedPoint> points, const Vec3& center,
                       double cutoff) {
  const std::size_t nb = block_count(points.size());
  const double cutoff2 = cutoff * cutoff;
  std::vector<Mat3> partial(nb, Mat3::Zero());
  const long long nbl = static_cast<long long>(nb);
#pragma omp parallel for schedule(static)
  for (long long b = 0; b < nbl; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(points.size(), lo + kBlock);
    Mat3 acc = Mat3::Zero();
    for (std::size_t i = lo; i < hi; ++i) {
      const Vec3 d = points[i].r - center;
      const double d2 = d.squaredNorm();
      if (d2 <= cutoff2) continue;
      acc += points[i].w * detail::field_kernel(d, d2);
    }
    partial[static_cast<std::size_t>(b)] = acc;
  }
  Mat3 total = Mat3::Zero();
  for (const auto& m : partial) total += m;
  return total;
}

Moments moments(std::span<const WeightedPoint> points) {
  const std::size_t nb = block_count(points.size());
  std::vector<Moments> partial(nb);
  const long long nbl = static_cast<long long>(nb);
#pragma omp parallel for schedule(static)
  for (long long b = 0; b < nbl; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(points.size(), lo + kBlock);
    Moments acc;
    for (std::size_t i = lo; i < hi; ++i) {
      acc.weight += points[i].w;
      acc.first += points[i].w * points[i].r;
    }
    partial[static_cast<std::size_t>(b)] = acc;
  }
  Moments total;
  for (const auto& m : partial) {
    total.weight += m.weight;
    total.first += m.first;
  }
  return total;
}

void mode_correlation(std::span<const ModeTerm> modes, std::span<const double> times,
                      double envelope_sigma, std::span<std::complex<double>> out) {
  const long long nt = static_cast<long long>(times.size());
#pragma omp parallel for schedule(static)
  for (long long m = 0; m < nt; ++m) {
    const auto i = static_cast<std::size_t>(m);
    out[i] = detail::correlation_at(modes, times[i], envelope_sigma);
  }
}

}  // namespace dpk::kernels
