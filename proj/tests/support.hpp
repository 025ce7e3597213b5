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

#ifndef DPK_TESTS_SUPPORT_HPP
#define DPK_TESTS_SUPPORT_HPP

#include <cmath>
#include <functional>
#include <random>
#include <string>

#include <Eigen/Geometry>

#include "dpk/error.hpp"
#include "dpk/ingest.hpp"
#include "dpk/text_io.hpp"

namespace dpk::test {

inline std::string fixture(const std::string& name) {
  return std::string(DPK_FIXTURE_DIR) + "/ci/" + name;
}

inline std::string read_fixture(const std::string& name) { return text::read_file(fixture(name)); }

// Error code thrown by f, or nullopt-like sentinel when nothing was thrown.
template <class F>
bool throws_code(F&& f, ErrorCode code) {
  try {
    f();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

// Cubic grid of n points per axis with step h, centred on `center`.
inline ScalarField cube(FieldKind kind, double norm, std::size_t n, double h,
                        const Vec3& center = Vec3::Zero()) {
  ScalarField f;
  f.kind = kind;
  f.expected_norm = norm;
  f.counts = {n, n, n};
  f.axes = Mat3::Identity() * h;
  const double half = 0.5 * static_cast<double>(n - 1) * h;
  f.origin = center - Vec3(half, half, half);
  f.values.assign(n * n * n, 0.0);
  return f;
}

inline void fill(ScalarField& f, const std::function<double(const Vec3&)>& fn) {
  for (std::size_t ix = 0; ix < f.counts[0]; ++ix)
    for (std::size_t iy = 0; iy < f.counts[1]; ++iy)
      for (std::size_t iz = 0; iz < f.counts[2]; ++iz)
        f.values[f.index(ix, iy, iz)] = fn(f.position(ix, iy, iz));
}

// Normalized 3D Gaussian density exp(-|r-c|²/2σ²)/(2πσ²)^{3/2}, times `total`.
inline double gaussian_density(const Vec3& r, const Vec3& c, double sigma, double total) {
  const double norm = std::pow(2.0 * M_PI * sigma * sigma, -1.5);
  return total * norm * std::exp(-(r - c).squaredNorm() / (2.0 * sigma * sigma));
}

inline Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  return q.normalized().toRotationMatrix();
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace dpk::test

#endif  // DPK_TESTS_SUPPORT_HPP
