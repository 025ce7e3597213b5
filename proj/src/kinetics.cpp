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

#include "dpk/kinetics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <set>

#include "dpk/error.hpp"
#include "dpk/text_io.hpp"

namespace dpk::kinetics {

namespace {

constexpr std::array<std::string_view, 20> kKnownKeys{
    "gamma_rad",          "gamma_nonrad",      "bright.total_decay", "isc_in.T0",
    "isc_in.Tp",          "isc_in.Tm",         "isc_out.T0",         "isc_out.Tp",
    "isc_out.Tm",         "pump.per_power",    "ionize.per_power",   "recapture.per_power",
    "recapture",          "microwave.T0_Tp",   "microwave.T0_Tm",    "dark.below_ionization",
    "dark.activation",    "dark.return",       "dark.decay",         "triplet_energy_ev"};

constexpr std::array<std::string_view, 3> kTriplets{"T0", "Tp", "Tm"};

bool known_key(std::string_view key) {
  return std::find(kKnownKeys.begin(), kKnownKeys.end(), key) != kKnownKeys.end();
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// Radau IIA, three stages.
struct Tableau {
  Eigen::Matrix3d a;
};

const Tableau& radau() {
  static const Tableau t = [] {
    const double s6 = std::sqrt(6.0);
    Tableau r;
    r.a << (88.0 - 7.0 * s6) / 360.0, (296.0 - 169.0 * s6) / 1800.0, (-2.0 + 3.0 * s6) / 225.0,
        (296.0 + 169.0 * s6) / 1800.0, (88.0 + 7.0 * s6) / 360.0, (-2.0 - 3.0 * s6) / 225.0,
        (16.0 - s6) / 36.0, (16.0 + s6) / 36.0, 1.0 / 9.0;
    return r;
  }();
  return t;
}

// One step for p' = G p. Stiffly accurate: the last stage is the update.
Eigen::VectorXd radau_step(const Eigen::MatrixXd& g, const Eigen::VectorXd& p, double h) {
  const auto n = g.rows();
  const auto& a = radau().a;
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3 * n, 3 * n);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m.block(i * n, j * n, n, n) -= h * a(i, j) * g;
  Eigen::VectorXd rhs(3 * n);
  for (int i = 0; i < 3; ++i) rhs.segment(i * n, n) = p;
  const Eigen::VectorXd z = m.partialPivLu().solve(rhs);
  return z.segment(2 * n, n);
}

int count_closed_classes(const Eigen::MatrixXd& g) {
  const auto n = static_cast<std::size_t>(g.rows());
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    reach[i][i] = true;
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && g(static_cast<long>(j), static_cast<long>(i)) > 0.0) reach[i][j] = true;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = true;
  // A class is closed when everything it reaches reaches back.
  int closed = 0;
  std::vector<bool> seen(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i]) continue;
    bool is_closed = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (reach[i][j] && reach[j][i]) seen[j] = true;
      if (reach[i][j] && !reach[j][i]) is_closed = false;
    }
    if (is_closed) ++closed;
  }
  return closed;
}

void check_population(const Eigen::VectorXd& p, std::size_t n) {
  if (static_cast<std::size_t>(p.size()) != n)
    throw Error(ErrorCode::InvalidPopulation, "expected " + std::to_string(n) + " entries, got " +
                                                  std::to_string(p.size()));
  if (!p.allFinite() || p.minCoeff() < -1e-12 || std::abs(p.sum() - 1.0) > 1e-9)
    throw Error(ErrorCode::InvalidPopulation, "populations must be ≥ 0 and sum to 1");
}

}  // namespace

bool RateConfig::has(std::string_view key) const {
  return entries.find(std::string(key)) != entries.end();
}

double RateConfig::get(std::string_view key, double fallback) const {
  const auto it = entries.find(std::string(key));
  return it == entries.end() ? fallback : it->second.value;
}

void RateConfig::set(std::string key, double value, bool assumed) {
  entries[std::move(key)] = {value, assumed};
}

RateConfig parse_rate_config(std::string_view text) {
  RateConfig cfg;
  for (const auto& line : text::split_lines(text)) {
    const auto eq = line.raw.find('=');
    if (eq == std::string_view::npos) text::malformed(line.number, line.raw, "expected key = value");
    const std::string key(trim(line.raw.substr(0, eq)));
    const auto rest = text::split_ws(line.raw.substr(eq + 1));
    if (key.empty() || rest.empty() || rest.size() > 2)
      text::malformed(line.number, line.raw, "expected key = value [assumed]");
    if (!known_key(key)) text::malformed(line.number, key, "unknown rate key");
    if (cfg.has(key)) text::malformed(line.number, key, "duplicate key");
    const double value = text::to_double(rest[0], line.number);
    bool assumed = false;
    if (rest.size() == 2) {
      if (rest[1] != "assumed") text::malformed(line.number, rest[1], "expected 'assumed'");
      assumed = true;
    }
    cfg.set(key, value, assumed);
  }
  return cfg;
}

std::string serialize(const RateConfig& config) {
  std::string out;
  for (const auto& [key, v] : config.entries) {
    out += key + " = " + text::shortest(v.value);
    if (v.assumed) out += " assumed";
    out += '\n';
  }
  return out;
}

RateConfig default_ci_config() {
  RateConfig c;
  c.set("gamma_rad", 1.0 / 2.83e-6);
  c.set("bright.total_decay", 1.0 / 5e-9);
  c.set("triplet_energy_ev", 0.29);
  for (auto t : kTriplets) c.set("isc_in." + std::string(t), 1e6, true);
  c.set("isc_out.T0", 1e5, true);
  c.set("isc_out.Tp", 1e3, true);
  c.set("isc_out.Tm", 1e3, true);
  c.set("pump.per_power", 1e7, true);
  c.set("ionize.per_power", 1e7, true);
  c.set("recapture.per_power", 1e6, true);
  c.set("recapture", 1e2, true);
  c.set("microwave.T0_Tp", 1e6, true);
  c.set("microwave.T0_Tm", 1e6, true);
  return c;
}

std::optional<int> RateNetwork::index(std::string_view label) const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i] == label) return static_cast<int>(i);
  return std::nullopt;
}

const MicrowavePair* RateNetwork::pair(std::string_view label) const {
  for (const auto& p : microwave)
    if (p.label == label) return &p;
  return nullptr;
}

Eigen::MatrixXd RateNetwork::generator(double power, std::span<const double> drive) const {
  const auto n = static_cast<long>(size());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  auto add = [&](int from, int to, double r) {
    if (r == 0.0) return;
    g(to, from) += r;
    g(from, from) -= r;
  };
  for (const auto& t : transitions) add(t.from, t.to, t.scaling == Scaling::Pump ? t.rate * power : t.rate);
  for (std::size_t k = 0; k < microwave.size() && k < drive.size(); ++k) {
    const double r = drive[k] * microwave[k].drive;
    add(microwave[k].a, microwave[k].b, r);
    add(microwave[k].b, microwave[k].a, r);
  }
  return g;
}

RateNetwork build_network(const RateConfig& config) {
  for (const auto& [key, v] : config.entries) {
    if (key == "triplet_energy_ev" || key == "dark.below_ionization") continue;
    if (!(v.value >= 0.0))
      throw Error(ErrorCode::NegativeRate, key + " = " + text::shortest(v.value));
  }
  if (!config.has("gamma_rad")) throw Error(ErrorCode::MissingKey, "gamma_rad");

  RateNetwork net;
  net.config = config;
  net.states = {"g", "b"};
  net.ground = 0;
  net.bright = 1;
  net.gamma_rad = config.get("gamma_rad");

  const bool triplets = std::any_of(kTriplets.begin(), kTriplets.end(), [&](auto t) {
    return config.has("isc_in." + std::string(t)) || config.has("isc_out." + std::string(t));
  });
  double isc_total = 0.0;
  if (triplets)
    for (auto t : kTriplets) isc_total += config.get("isc_in." + std::string(t));

  double nonrad = 0.0;
  if (config.has("gamma_nonrad")) {
    nonrad = config.get("gamma_nonrad");
  } else if (config.has("bright.total_decay")) {
    nonrad = config.get("bright.total_decay") - net.gamma_rad - isc_total;
    if (nonrad < 0.0)
      throw Error(ErrorCode::NegativeRate,
                  "bright.total_decay is below gamma_rad + ISC; derived gamma_nonrad = " +
                      text::shortest(nonrad));
    net.config.set("gamma_nonrad", nonrad, config.entries.at("bright.total_decay").assumed);
  }

  net.transitions.push_back({1, 0, net.gamma_rad + nonrad, Scaling::Fixed});
  net.transitions.push_back({0, 1, config.get("pump.per_power"), Scaling::Pump});

  if (triplets) {
    const double t0 = config.get("isc_out.T0");
    for (auto t : {"Tp", "Tm"}) {
      const double r = config.get("isc_out." + std::string(t));
      if (r > t0)
        throw Error(ErrorCode::SelectionRuleViolation,
                    std::string("isc_out.") + t + " = " + text::shortest(r) +
                        " exceeds isc_out.T0 = " + text::shortest(t0));
    }
    for (auto t : kTriplets) {
      const int idx = static_cast<int>(net.states.size());
      net.states.emplace_back(t);
      net.transitions.push_back({1, idx, config.get("isc_in." + std::string(t)), Scaling::Fixed});
      net.transitions.push_back({idx, 0, config.get("isc_out." + std::string(t)), Scaling::Fixed});
    }
    for (auto label : {"T0_Tp", "T0_Tm"}) {
      const std::string key = "microwave." + std::string(label);
      if (!config.has(key)) continue;
      const std::string other = std::string(label).substr(3);
      net.microwave.push_back({label, *net.index("T0"), *net.index(other), config.get(key)});
    }
  } else if (config.has("microwave.T0_Tp") || config.has("microwave.T0_Tm")) {
    throw Error(ErrorCode::UnknownState, "microwave drive needs triplet sublevels");
  }

  if (config.has("ionize.per_power") || config.has("recapture.per_power") ||
      config.has("recapture")) {
    const int ion = static_cast<int>(net.states.size());
    net.states.emplace_back("ion");
    net.transitions.push_back({1, ion, config.get("ionize.per_power"), Scaling::Pump});
    net.transitions.push_back({ion, 0, config.get("recapture.per_power"), Scaling::Pump});
    net.transitions.push_back({ion, 0, config.get("recapture"), Scaling::Fixed});
  }

  if (config.get("dark.below_ionization") != 0.0) {
    const int dark = static_cast<int>(net.states.size());
    net.states.emplace_back("dark");
    net.transitions.push_back({1, dark, config.get("dark.activation"), Scaling::Fixed});
    net.transitions.push_back({dark, 1, config.get("dark.return"), Scaling::Fixed});
    net.transitions.push_back({dark, 0, config.get("dark.decay"), Scaling::Fixed});
  }
  return net;
}

Eigen::VectorXd steady_state(const RateNetwork& net, double power, std::span<const double> drive) {
  if (!(power >= 0.0)) throw Error(ErrorCode::NonPhysicalInput, "power must be ≥ 0");
  const Eigen::MatrixXd g = net.generator(power, drive);
  const auto n = g.rows();
  if (n == 1) return Eigen::VectorXd::Ones(1);
  const int closed = count_closed_classes(g);
  if (closed != 1)
    throw Error(ErrorCode::Reducible, std::to_string(closed) + " closed classes at power " +
                                          text::shortest(power));
  Eigen::MatrixXd m = g;
  m.row(0).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[0] = 1.0;
  Eigen::VectorXd p = m.fullPivLu().solve(rhs);
  for (long i = 0; i < n; ++i)
    if (p[i] < 0.0 && p[i] > -1e-13) p[i] = 0.0;
  const double scale = g.cwiseAbs().colwise().sum().maxCoeff();
  const double residual = (g * p).cwiseAbs().sum();
  if (!p.allFinite() || residual > 1e-10 * scale || p.minCoeff() < 0.0)
    throw Error(ErrorCode::NonConvergent, "steady-state residual " + text::sig6(residual) +
                                              " against generator norm " + text::sig6(scale));
  return p;
}

double PiecewiseConstant::at(double t) const {
  std::size_t k = 0;
  while (k + 1 < starts.size() && starts[k + 1] <= t) ++k;
  return values[k];
}

PopulationTrajectory integrate(const RateNetwork& net, const Eigen::VectorXd& initial,
                               double duration, const PiecewiseConstant& power,
                               const PiecewiseConstant& microwave,
                               const IntegrateOptions& options) {
  check_population(initial, net.size());
  if (!(duration >= 0.0)) throw Error(ErrorCode::NonPhysicalInput, "duration must be ≥ 0");
  if (power.starts.size() != power.values.size() ||
      microwave.starts.size() != microwave.values.size())
    throw Error(ErrorCode::NonPhysicalInput, "profile starts/values length mismatch");

  std::set<double> stops{duration};
  for (double s : power.starts)
    if (s > 0.0 && s < duration) stops.insert(s);
  for (double s : microwave.starts)
    if (s > 0.0 && s < duration) stops.insert(s);
  const std::set<double> outputs(options.output_times.begin(), options.output_times.end());
  for (double s : outputs)
    if (s > 0.0 && s < duration) stops.insert(s);

  PopulationTrajectory traj;
  auto record = [&](double t, const Eigen::VectorXd& p) {
    traj.times.push_back(t);
    traj.populations.push_back(p);
  };
  Eigen::VectorXd p = initial;
  if (outputs.empty() || outputs.count(0.0)) record(0.0, p);
  if (duration == 0.0) return traj;

  const double h_min = options.min_step_fraction * duration;
  double t = 0.0;
  double h = options.initial_step;
  std::vector<double> drive(net.microwave.size());

  for (double stop : stops) {
    const double mid = 0.5 * (t + stop);
    std::fill(drive.begin(), drive.end(), microwave.at(mid));
    const Eigen::MatrixXd g = net.generator(power.at(mid), drive);
    const double fastest = g.diagonal().cwiseAbs().maxCoeff();
    if (h <= 0.0) h = fastest > 0.0 ? 0.1 / fastest : duration;

    while (t < stop) {
      if (traj.accepted + traj.rejected >= options.max_steps)
        throw Error(ErrorCode::StepFailure, "step budget exhausted at t = " + text::shortest(t));
      const bool last = t + h >= stop * (1.0 - 1e-14);
      const double step = last ? stop - t : h;
      const Eigen::VectorXd one = radau_step(g, p, step);
      const Eigen::VectorXd half = radau_step(g, p, 0.5 * step);
      const Eigen::VectorXd two = radau_step(g, half, 0.5 * step);

      double err = 0.0;
      for (long i = 0; i < p.size(); ++i) {
        const double sc = options.atol + options.rtol * std::max(std::abs(two[i]), std::abs(p[i]));
        err = std::max(err, std::abs(two[i] - one[i]) / sc);
      }
      err /= 31.0;  // 2^5 − 1
      const bool negative = two.minCoeff() < -options.atol;

      if (err <= 1.0 && !negative) {
        p = two;
        t = last ? stop : t + step;
        ++traj.accepted;
        if (outputs.empty()) record(t, p);
        const double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -1.0 / 6.0), 0.2, 5.0);
        // Keep the proposal from the full step even when the last step was clipped.
        h = std::max(h, step) * grow;
      } else {
        ++traj.rejected;
        h = negative ? 0.5 * step : step * std::clamp(0.9 * std::pow(err, -1.0 / 6.0), 0.1, 0.5);
        if (h < h_min)
          throw Error(ErrorCode::StepFailure,
                      "step fell below " + text::shortest(h_min) + " s at t = " + text::shortest(t));
      }
    }
    if (outputs.count(stop)) record(stop, p);
  }
  return traj;
}

namespace {

double pl_at(const RateNetwork& net, double power) {
  return net.gamma_rad * steady_state(net, power)[net.bright];
}

}  // namespace

std::vector<std::pair<double, double>> pl_curve_serial(const RateNetwork& net,
                                                       std::span<const double> powers) {
  std::vector<std::pair<double, double>> out;
  out.reserve(powers.size());
  for (double p : powers) out.emplace_back(p, pl_at(net, p));
  return out;
}

std::vector<std::pair<double, double>> pl_curve(const RateNetwork& net,
                                                std::span<const double> powers) {
  std::vector<std::pair<double, double>> out(powers.size());
  std::vector<std::exception_ptr> errors(powers.size());
  const long long n = static_cast<long long>(powers.size());
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out[k] = {powers[k], pl_at(net, powers[k])};
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

double odmr_contrast(const RateNetwork& net, std::string_view pair_label, double power,
                     std::optional<double> drive_override) {
  const MicrowavePair* pair = net.pair(pair_label);
  if (!pair) throw Error(ErrorCode::NoSuchPair, std::string(pair_label));
  RateNetwork driven = net;
  std::vector<double> drive(net.microwave.size(), 0.0);
  for (std::size_t k = 0; k < net.microwave.size(); ++k) {
    if (net.microwave[k].label != pair_label) continue;
    drive[k] = 1.0;
    if (drive_override) driven.microwave[k].drive = *drive_override;
  }
  const double off = net.gamma_rad * steady_state(net, power)[net.bright];
  const double on = net.gamma_rad * steady_state(driven, power, drive)[net.bright];
  if (!(off > 0.0))
    throw Error(ErrorCode::NonPhysicalInput, "PL vanishes without drive at power " +
                                                 text::shortest(power));
  return (on - off) / off;
}

}  // namespace dpk::kinetics
