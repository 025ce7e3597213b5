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

#ifndef DPK_KINETICS_HPP
#define DPK_KINETICS_HPP

/// @file kinetics.hpp
/// Classical rate equations dp/dt = G p over the optical cycle: ground (g),
/// bright singlet (b), triplet sublevels (T0, Tp, Tm), ionized (ion) and an
/// optional dark singlet. G[i][j] is the rate j → i in 1/s.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace dpk::kinetics {

struct RateValue {
  double value = 0.0;
  bool assumed = false;
};

/// `key = value [assumed]` lines. Rates in 1/s; `.per_power` entries are
/// per unit normalized power.
struct RateConfig {
  std::map<std::string, RateValue> entries;

  bool has(std::string_view key) const;
  double get(std::string_view key, double fallback = 0.0) const;
  void set(std::string key, double value, bool assumed = false);
};

RateConfig parse_rate_config(std::string_view text);
std::string serialize(const RateConfig& config);

/// Seven-level defaults for the carbon interstitial; magnitudes that are
/// placeholders carry the assumed flag.
RateConfig default_ci_config();

enum class Scaling { Fixed, Pump, Microwave };

struct Transition {
  int from = 0;
  int to = 0;
  double rate = 0.0;  // 1/s, or 1/s per unit power for Pump
  Scaling scaling = Scaling::Fixed;
};

struct MicrowavePair {
  std::string label;  // "T0_Tp" or "T0_Tm"
  int a = 0;
  int b = 0;
  double drive = 0.0;  // 1/s in both directions
};

struct RateNetwork {
  std::vector<std::string> states;
  std::vector<Transition> transitions;
  std::vector<MicrowavePair> microwave;
  int ground = 0;
  int bright = 1;
  double gamma_rad = 0.0;
  RateConfig config;  // effective rates, echoed in output headers

  std::size_t size() const { return states.size(); }
  std::optional<int> index(std::string_view label) const;
  const MicrowavePair* pair(std::string_view label) const;

  /// Generator at a given power. `drive` holds one multiplier per
  /// microwave pair; empty means all pairs off.
  Eigen::MatrixXd generator(double power, std::span<const double> drive = {}) const;
};

RateNetwork build_network(const RateConfig& config);

/// Unique stationary distribution of G(power); Reducible when more than one
/// closed class exists.
Eigen::VectorXd steady_state(const RateNetwork& net, double power,
                             std::span<const double> drive = {});

/// Piecewise-constant profile; values[i] holds on [starts[i], starts[i+1]).
struct PiecewiseConstant {
  std::vector<double> starts{0.0};
  std::vector<double> values{0.0};

  static PiecewiseConstant constant(double v) { return {{0.0}, {v}}; }
  double at(double t) const;
};

struct IntegrateOptions {
  double rtol = 1e-8;
  double atol = 1e-12;
  double initial_step = 0.0;        // ≤ 0: chosen from the fastest rate
  double min_step_fraction = 1e-15; // of duration
  std::size_t max_steps = 2'000'000;
  std::vector<double> output_times; // empty: every accepted step
};

struct PopulationTrajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> populations;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

/// Radau IIA (3 stages, order 5) with step-doubling error control. Steps
/// never straddle a profile breakpoint. `microwave` scales every pair.
PopulationTrajectory integrate(const RateNetwork& net, const Eigen::VectorXd& initial,
                               double duration, const PiecewiseConstant& power,
                               const PiecewiseConstant& microwave,
                               const IntegrateOptions& options = {});

/// (power, Γ_rad·p_b) pairs.
std::vector<std::pair<double, double>> pl_curve(const RateNetwork& net,
                                                std::span<const double> powers);
std::vector<std::pair<double, double>> pl_curve_serial(const RateNetwork& net,
                                                       std::span<const double> powers);

/// (PL_on − PL_off)/PL_off at steady state with one pair driven at its
/// configured strength (or `drive_override` when given).
double odmr_contrast(const RateNetwork& net, std::string_view pair_label, double power,
                     std::optional<double> drive_override = std::nullopt);

}  // namespace dpk::kinetics

#endif  // DPK_KINETICS_HPP
