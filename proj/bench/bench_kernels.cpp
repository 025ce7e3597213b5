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

// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "dpk/kernels.hpp"

namespace {

using dpk::kernels::ModeTerm;
using dpk::kernels::WeightedPoint;

std::vector<WeightedPoint> cloud(std::size_t n) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<WeightedPoint> pts(n);
  for (auto& p : pts) p = {{u(rng), u(rng), u(rng)}, 2.0 / static_cast<double>(n)};
  return pts;
}

std::vector<ModeTerm> modes(std::size_t n) {
  std::vector<ModeTerm> m(n);
  for (std::size_t k = 0; k < n; ++k) m[k] = {5.0 + 60.0 * k / n, 0.01, 0.0};
  return m;
}

template <bool Serial>
void BM_PairSum(benchmark::State& state) {
  const auto pts = cloud(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto t = Serial ? dpk::kernels::serial::dipolar_pair_sum(pts, 0.1)
                    : dpk::kernels::dipolar_pair_sum(pts, 0.1);
    benchmark::DoNotOptimize(t);
  }
  state.SetComplexityN(state.range(0));
}

template <bool Serial>
void BM_FieldSum(benchmark::State& state) {
  const auto pts = cloud(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto t = Serial ? dpk::kernels::serial::dipolar_field_sum(pts, {0, 0, 0}, 0.1)
                    : dpk::kernels::dipolar_field_sum(pts, {0, 0, 0}, 0.1);
    benchmark::DoNotOptimize(t);
  }
}

template <bool Serial>
void BM_ModeCorrelation(benchmark::State& state) {
  const auto m = modes(static_cast<std::size_t>(state.range(0)));
  std::vector<double> t(1 << 14);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = 0.01 * static_cast<double>(i);
  std::vector<std::complex<double>> out(t.size());
  for (auto _ : state) {
    if (Serial)
      dpk::kernels::serial::mode_correlation(m, t, 1.0, out);
    else
      dpk::kernels::mode_correlation(m, t, 1.0, out);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_PairSum<true>)->Name("pair_sum/serial")->Arg(1000)->Arg(4000);
BENCHMARK(BM_PairSum<false>)->Name("pair_sum/omp")->Arg(1000)->Arg(4000);
BENCHMARK(BM_FieldSum<true>)->Name("field_sum/serial")->Arg(1 << 18);
BENCHMARK(BM_FieldSum<false>)->Name("field_sum/omp")->Arg(1 << 18);
BENCHMARK(BM_ModeCorrelation<true>)->Name("mode_correlation/serial")->Arg(64)->Arg(1536);
BENCHMARK(BM_ModeCorrelation<false>)->Name("mode_correlation/omp")->Arg(64)->Arg(1536);

BENCHMARK_MAIN();
