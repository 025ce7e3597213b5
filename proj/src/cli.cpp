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

#include "dpk/cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include "dpk/error.hpp"
#include "dpk/ingest.hpp"
#include "dpk/kinetics.hpp"
#include "dpk/levels.hpp"
#include "dpk/lineshape.hpp"
#include "dpk/photophysics.hpp"
#include "dpk/report.hpp"
#include "dpk/spinham.hpp"
#include "dpk/text_io.hpp"

namespace dpk::cli {

namespace {

namespace fs = std::filesystem;
using report::Report;

// Missing arguments or unreadable files; exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string fixtures;
  std::string format = "plain";
  std::string output;

  // files
  std::optional<std::string> ground, excited, phonons, orbital_i, orbital_f, spin_density,
      point_spins, manifest, config;

  // scalars
  std::optional<double> ezpl_ev, dipole_debye, n_index, d_mhz, e_mhz, abundance, homo_ev,
      power, gap_ev, exciton_level_ev, e_n_ev, e_n1_ev, g_factor, drive_per_s, duration_s,
      emin_ev, emax_ev;
  double temperature_k = 0.0;
  double zpl_fwhm_mev = 1.0;
  double smearing_mev = 1.0;
  double resolution_mev = 0.05;
  double fermi_ev = 0.0;
  double resolution_ev = 0.01;
  double exclusion_radius_a = 0.0;
  double power_max = 1.0;
  int points = 21;
  int samples = 11;
  std::string profile = "gaussian";
  std::string initial_irrep, final_irrep;
  std::string nucleus;
  std::string pair = "T0_Tp";
  std::string n_entry, n1_entry;
  std::vector<std::string> modes;
  std::vector<double> b_mt, position, tau_pl_s, powers;
  std::vector<int> sites;
  bool hr_only = false;
  bool no_error_estimate = false;
  bool default_ci = false;
};

// Everything a subcommand needs besides its options.
class Context {
 public:
  explicit Context(const Options& o) : o_(o) {
    if (o.fixtures.empty()) return;
    if (!fs::is_directory(o.fixtures))
      throw UsageError("--fixtures: '" + o.fixtures + "' is not a directory");
    const fs::path case_file = fs::path(o.fixtures) / "case.conf";
    if (!fs::exists(case_file)) return;
    for (const auto& line : text::split_lines(read(case_file.string()))) {
      const auto eq = line.raw.find('=');
      if (eq == std::string_view::npos) continue;
      auto key = text::split_ws(line.raw.substr(0, eq));
      if (key.size() != 1) continue;
      case_[std::string(key[0])] = std::string(line.raw.substr(eq + 1));
    }
  }

  std::string read(const std::string& path) const {
    try {
      return text::read_file(path);
    } catch (const std::runtime_error& e) {
      throw UsageError(e.what());
    }
  }

  std::string file(const std::optional<std::string>& given, std::string_view flag,
                   std::string_view fixture) const {
    if (given) return *given;
    if (!o_.fixtures.empty()) return (fs::path(o_.fixtures) / fixture).string();
    throw UsageError("--" + std::string(flag) + " is required");
  }

  double scalar(const std::optional<double>& given, std::string_view flag) const {
    if (given) return *given;
    if (auto v = from_case(flag); v && v->size() == 1) return text::to_double((*v)[0], 0);
    throw UsageError("--" + std::string(flag) + " is required");
  }

  std::vector<double> vector(const std::vector<double>& given, std::string_view flag,
                             std::size_t n) const {
    if (!given.empty()) return given;
    if (auto v = from_case(flag); v && v->size() == n) {
      std::vector<double> out;
      for (auto t : *v) out.push_back(text::to_double(t, 0));
      return out;
    }
    throw UsageError("--" + std::string(flag) + " is required");
  }

  std::string word(const std::string& given, std::string_view flag) const {
    if (!given.empty()) return given;
    if (auto v = from_case(flag); v && v->size() == 1) return std::string((*v)[0]);
    throw UsageError("--" + std::string(flag) + " is required");
  }

  Warnings warnings;

 private:
  std::optional<std::vector<std::string_view>> from_case(std::string_view flag) const {
    const auto it = case_.find(std::string(flag));
    if (it == case_.end()) return std::nullopt;
    return text::split_ws(it->second);
  }

  const Options& o_;
  std::map<std::string, std::string> case_;
};

// Prefixes parser errors with the file they came from.
template <class F>
auto load(const Context& ctx, const std::string& path, F&& parse) {
  const std::string text = ctx.read(path);
  try {
    return parse(text);
  } catch (const Error& e) {
    std::string what = e.what();
    const auto colon = what.find(": ");
    throw Error(e.code(), path + ": " + (colon == std::string::npos ? what : what.substr(colon + 2)));
  }
}

std::string vec_text(const Vec3& v) {
  return text::sig6(v.x()) + " " + text::sig6(v.y()) + " " + text::sig6(v.z());
}

void tensor_rows(Report& r, const Mat3& t) {
  r.columns = {"row", "x_MHz", "y_MHz", "z_MHz"};
  const char* names[] = {"x", "y", "z"};
  for (int i = 0; i < 3; ++i)
    r.add_row({names[i], text::sig6(t(i, 0)), text::sig6(t(i, 1)), text::sig6(t(i, 2))});
}

void echo_rates(Report& r, const kinetics::RateConfig& cfg) {
  for (const auto& [key, v] : cfg.entries) {
    std::string unit = "_per_s";
    if (key.ends_with(".per_power")) unit = "_per_s";
    if (key == "triplet_energy_ev") {
      r.add("triplet_energy_eV", text::sig6(v.value) + (v.assumed ? " assumed=true" : ""));
      continue;
    }
    if (key == "dark.below_ionization") unit = "";
    r.add("rate." + key + unit, text::sig6(v.value) + (v.assumed ? " assumed=true" : ""));
  }
}

kinetics::RateNetwork load_network(const Context& ctx, const Options& o) {
  if (o.default_ci) return kinetics::build_network(kinetics::default_ci_config());
  const auto cfg = load(ctx, ctx.file(o.config, "config", "rates.conf"),
                        [](const std::string& t) { return kinetics::parse_rate_config(t); });
  return kinetics::build_network(cfg);
}

lineshape::HuangRhysDecomposition hr_from_options(const Context& ctx, const Options& o) {
  if (!o.modes.empty()) {
    std::vector<std::pair<double, double>> pairs;
    for (const auto& m : o.modes) {
      const auto colon = m.find(':');
      if (colon == std::string::npos) throw UsageError("--mode expects ENERGY_MEV:S, got '" + m + "'");
      pairs.emplace_back(text::to_double(std::string_view(m).substr(0, colon), 0),
                         text::to_double(std::string_view(m).substr(colon + 1), 0));
    }
    return lineshape::HuangRhysDecomposition::from_factors(pairs);
  }
  const auto parse_structure = [](const std::string& t) { return dpk::parse_structure(t); };
  const auto ground = load(ctx, ctx.file(o.ground, "ground", "ground.struct"), parse_structure);
  const auto excited = load(ctx, ctx.file(o.excited, "excited", "excited.struct"), parse_structure);
  const auto basis = load(ctx, ctx.file(o.phonons, "phonons", "phonons.txt"),
                          [](const std::string& t) { return dpk::parse_phonons(t); });
  const auto disp = lineshape::mass_weighted_displacement(ground, excited);
  return lineshape::partial_hr_factors(disp, basis);
}

ScalarField load_grid(Context& ctx, const std::string& path) {
  return load(ctx, path, [&](const std::string& t) { return dpk::parse_grid(t, &ctx.warnings); });
}

// -- subcommands ----------------------------------------------------------

Report cmd_lineshape(Context& ctx, const Options& o) {
  const auto hr = hr_from_options(ctx, o);
  Report r;
  r.title = "lineshape";
  r.add("S_tot", hr.total);
  r.add("debye_waller", lineshape::debye_waller(hr));
  if (o.hr_only) {
    r.columns = {"energy_meV", "q_amu^0.5_A", "s"};
    for (const auto& m : hr.modes) r.add_row({m.energy_mev, m.q, m.s});
    return r;
  }
  lineshape::LineshapeOptions lo;
  lo.zpl_energy_ev = ctx.scalar(o.ezpl_ev, "ezpl-ev");
  lo.temperature_k = o.temperature_k;
  lo.zpl_width_mev = o.zpl_fwhm_mev;
  lo.profile = o.profile == "lorentzian" ? lineshape::ZplProfile::Lorentzian
                                         : lineshape::ZplProfile::Gaussian;
  lo.phonon_smearing_mev = o.smearing_mev;
  lo.resolution_mev = o.resolution_mev;
  const auto sp = lineshape::generating_function_spectrum(hr, lo);

  const double lo_e = o.emin_ev.value_or(lo.zpl_energy_ev - 0.5);
  const double hi_e = o.emax_ev.value_or(lo.zpl_energy_ev + 0.05);
  r.add("zpl_energy_eV", lo.zpl_energy_ev);
  r.add("zpl_fwhm_meV", lo.zpl_width_mev);
  r.add("zpl_profile", o.profile);
  r.add("phonon_smearing_meV", lo.phonon_smearing_mev);
  r.add("temperature_K", lo.temperature_k);
  r.add("resolution_meV", lo.resolution_mev);
  r.add("area", sp.integral());
  r.columns = {"energy_eV", "intensity_per_eV"};
  for (std::size_t i = 0; i < sp.energy_ev.size(); ++i) {
    if (sp.energy_ev[i] < lo_e || sp.energy_ev[i] > hi_e) continue;
    r.add_row({sp.energy_ev[i], sp.intensity_per_ev[i]});
  }
  return r;
}

photophysics::TransitionDipole dipole_from_grids(Context& ctx, const Options& o) {
  const auto a = load_grid(ctx, ctx.file(o.orbital_i, "orbital-i", "orbital_i.grid"));
  const auto b = load_grid(ctx, ctx.file(o.orbital_f, "orbital-f", "orbital_f.grid"));
  return photophysics::transition_dipole_grid(a, b);
}

Report cmd_lifetime(Context& ctx, const Options& o) {
  const double e = ctx.scalar(o.ezpl_ev, "ezpl-ev");
  const double n = ctx.scalar(o.n_index, "n");
  const auto mu = (o.orbital_i || o.orbital_f)
                      ? dipole_from_grids(ctx, o)
                      : photophysics::TransitionDipole::from_magnitude(
                            ctx.scalar(o.dipole_debye, "dipole-debye"));
  const auto em = photophysics::radiative_rate(e, mu, n);
  Report r;
  r.title = "lifetime";
  r.add("zpl_energy_eV", e);
  r.add("dipole_D", mu.magnitude_debye);
  r.add("dipole_source", mu.source == photophysics::DipoleSource::Grid ? "grid" : "user");
  r.add("refractive_index", n);
  r.add("rate_per_s", em.rate_per_s);
  r.add("tau_rad_s", em.lifetime.to_text());
  if (!o.tau_pl_s.empty()) {
    if (em.lifetime.infinite()) throw Error(ErrorCode::NonPhysicalInput, "radiative lifetime is infinite");
    r.columns = {"tau_pl_s", "quantum_yield"};
    for (double t : o.tau_pl_s) r.add_row({t, photophysics::quantum_yield(em.lifetime.seconds, t)});
  }
  return r;
}

Report cmd_dipole(Context& ctx, const Options& o) {
  const auto mu = dipole_from_grids(ctx, o);
  Report r;
  r.title = "dipole";
  r.add("mu_x_D", mu.vector_debye.x());
  r.add("mu_y_D", mu.vector_debye.y());
  r.add("mu_z_D", mu.vector_debye.z());
  r.add("mu_abs_D", mu.magnitude_debye);
  return r;
}

photophysics::Irrep irrep_or_throw(const std::string& s) {
  const auto i = photophysics::parse_irrep(s);
  if (!i) throw UsageError("unknown C2v irrep '" + s + "' (A1, A2, B1, B2)");
  return *i;
}

std::string polarization_text(const photophysics::DipoleVerdict& v) {
  if (!v.allowed) return "none";
  std::string s;
  for (auto a : v.polarizations) s += (s.empty() ? "" : ",") + std::string(photophysics::to_string(a));
  return s;
}

Report cmd_selection(Context&, const Options& o) {
  using namespace photophysics;
  Report r;
  r.title = "selection";
  r.add("point_group", "C2v");
  r.add("dipole_irreps", "x=B1 y=B2 z=A1");
  r.columns = {"initial", "final", "allowed", "polarization"};
  std::vector<Irrep> initial(kIrreps.begin(), kIrreps.end()), final_states = initial;
  if (!o.initial_irrep.empty()) initial = {irrep_or_throw(o.initial_irrep)};
  if (!o.final_irrep.empty()) final_states = {irrep_or_throw(o.final_irrep)};
  for (auto i : initial)
    for (auto f : final_states) {
      const auto v = dipole_allowed(i, f);
      r.add_row({std::string(to_string(i)), std::string(to_string(f)), v.allowed ? "yes" : "no",
                 polarization_text(v)});
    }
  return r;
}

std::vector<spinham::PointSpin> parse_point_spins(const std::string& t) {
  std::vector<spinham::PointSpin> out;
  for (const auto& l : text::split_lines(t)) {
    if (l.tokens.size() != 4) text::malformed(l.number, l.raw, "expected x y z weight");
    out.push_back({Vec3(text::to_double(l.tokens[0], l.number), text::to_double(l.tokens[1], l.number),
                        text::to_double(l.tokens[2], l.number)),
                   text::to_double(l.tokens[3], l.number)});
  }
  return out;
}

Report cmd_zfs(Context& ctx, const Options& o) {
  spinham::ZfsTensor z;
  if (o.point_spins) {
    const auto spins = load(ctx, *o.point_spins, parse_point_spins);
    z = spinham::zfs_from_point_spins(spins);
  } else {
    const auto rho = load_grid(ctx, ctx.file(o.spin_density, "spin-density", "triplet_density.grid"));
    spinham::ZfsGridOptions zo;
    zo.estimate_error = !o.no_error_estimate;
    z = spinham::zfs_from_spin_density(rho, zo);
  }
  Report r;
  r.title = "zfs";
  r.add("sign_convention", "|Dxx|<=|Dyy|<=|Dzz|, D=1.5*Dzz signed, E=|Dxx-Dyy|/2");
  r.add("D_MHz", z.d_mhz);
  r.add("E_MHz", z.e_mhz);
  r.add("principal_MHz", vec_text(z.principal));
  if (!o.point_spins && !o.no_error_estimate) r.add("discretization_error", z.discretization_error);
  tensor_rows(r, z.tensor);
  return r;
}

Report cmd_hyperfine(Context& ctx, const Options& o) {
  const auto rho = load_grid(ctx, ctx.file(o.spin_density, "spin-density", "spin_density.grid"));
  spinham::Nucleus nuc;
  nuc.species = ctx.word(o.nucleus, "nucleus");
  const auto p = ctx.vector(o.position, "position", 3);
  nuc.position = Vec3(p[0], p[1], p[2]);
  if (o.g_factor) {
    nuc.g_factor = *o.g_factor;
  } else if (auto g = spinham::nuclear_g_factor(nuc.species)) {
    nuc.g_factor = *g;
  } else {
    throw UsageError("unknown isotope '" + nuc.species + "'; pass --g-factor");
  }
  spinham::HyperfineOptions ho;
  ho.exclusion_radius = o.exclusion_radius_a;
  const auto h = spinham::hyperfine_from_spin_density(rho, nuc, ho);
  Report r;
  r.title = "hyperfine";
  r.add("nucleus", nuc.species);
  r.add("g_factor", nuc.g_factor);
  r.add("position_A", vec_text(nuc.position));
  r.add("a_iso_MHz", h.a_iso_mhz);
  r.add("principal_MHz", vec_text(h.principal));
  tensor_rows(r, h.tensor);
  return r;
}

spinham::SpinLevelSet levels_from_options(const Context& ctx, const Options& o) {
  const auto z = spinham::ZfsTensor::from_de(ctx.scalar(o.d_mhz, "d-mhz"), ctx.scalar(o.e_mhz, "e-mhz"));
  Vec3 b = Vec3::Zero();
  if (!o.b_mt.empty()) {
    if (o.b_mt.size() != 3) throw UsageError("--b-mt expects three components");
    b = Vec3(o.b_mt[0], o.b_mt[1], o.b_mt[2]);
  }
  return spinham::triplet_levels(z, b);
}

std::string lines_text(const std::vector<spinham::OdmrLine>& lines, bool allowed) {
  std::string s;
  for (const auto& l : lines)
    if (l.allowed == allowed) s += (s.empty() ? "" : " ") + text::sig6(l.frequency_mhz);
  return s.empty() ? "none" : s;
}

Report cmd_spin_levels(Context& ctx, const Options& o) {
  const auto lv = levels_from_options(ctx, o);
  const auto lines = spinham::odmr_frequencies(lv);
  Report r;
  r.title = "spin-levels";
  r.add("D_MHz", ctx.scalar(o.d_mhz, "d-mhz"));
  r.add("E_MHz", ctx.scalar(o.e_mhz, "e-mhz"));
  r.add("B_mT", vec_text(lv.field_mt));
  r.add("eigenvalue_sum_MHz", lv.energies_mhz.sum());
  r.add("allowed_transitions_MHz", lines_text(lines, true));
  r.add("forbidden_transitions_MHz", lines_text(lines, false));
  r.columns = {"level", "energy_MHz", "p(m=-1)", "p(m=0)", "p(m=+1)"};
  for (int i = 0; i < 3; ++i)
    r.add_row({static_cast<double>(i), lv.energies_mhz[i], std::norm(lv.vectors(0, i)),
               std::norm(lv.vectors(1, i)), std::norm(lv.vectors(2, i))});
  return r;
}

Report cmd_odmr(Context& ctx, const Options& o) {
  const auto lines = spinham::odmr_frequencies(levels_from_options(ctx, o));
  Report r;
  r.title = "odmr";
  r.columns = {"freq_MHz", "intensity", "flag"};
  for (const auto& l : lines)
    r.add_row({text::sig6(l.frequency_mhz), text::sig6(l.intensity), l.allowed ? "allowed" : "forbidden"});
  return r;
}

Report cmd_isotope(Context& ctx, const Options& o) {
  std::vector<int> sites = o.sites;
  if (sites.empty()) {
    for (double v : ctx.vector({}, "sites", 1)) sites.push_back(static_cast<int>(v));
  }
  const double a = ctx.scalar(o.abundance, "abundance");
  int total = 0;
  for (int s : sites) total += s;
  Report r;
  r.title = "isotope";
  r.add("sites", std::to_string(total));
  r.add("abundance", a);
  r.add("probability", spinham::isotope_risk(sites, a));
  return r;
}

EnergyManifest load_manifest(const Context& ctx, const Options& o) {
  return load(ctx, ctx.file(o.manifest, "manifest", "manifest.txt"),
              [](const std::string& t) { return dpk::parse_manifest(t); });
}

Report cmd_levels(Context& ctx, const Options& o) {
  const auto m = load_manifest(ctx, o);
  Report r;
  r.title = "levels";
  r.add("e_v_eV", m.valence_band_ev);
  r.add("e_c_eV", m.conduction_band_ev);
  r.add("gap_eV", m.gap());
  r.add("fermi_eV", o.fermi_ev);

  std::vector<int> charges;
  for (const auto& e : m.entries) charges.push_back(e.charge);
  std::sort(charges.begin(), charges.end(), std::greater<>());
  charges.erase(std::unique(charges.begin(), charges.end()), charges.end());
  for (std::size_t i = 0; i + 1 < charges.size(); ++i) {
    const auto t = levels::transition_level(m, charges[i], charges[i + 1]);
    r.add("level_" + t.label() + "_eV", t.position_ev);
    if (!t.inside_gap) ctx.warnings.push_back("LevelOutsideGap: " + t.label());
  }
  if (o.exciton_level_ev || o.ezpl_ev) {
    const auto b = levels::exciton_binding(ctx.scalar(o.exciton_level_ev, "exciton-level-ev"),
                                           ctx.scalar(o.ezpl_ev, "ezpl-ev"), m.gap());
    r.add("exciton_binding_eV", b.binding_ev);
    for (const auto& w : b.warnings) ctx.warnings.push_back(w);
  }
  r.columns = {"entry", "charge_e", "formation_eV", "correction_eV"};
  for (const auto& e : m.entries) {
    const auto line = levels::formation_line(m, e.label);
    r.add_row({e.label, std::to_string(e.charge), text::sig6(line.at(o.fermi_ev)),
               text::sig6(line.correction_ev)});
  }
  return r;
}

Report cmd_ctl_diagram(Context& ctx, const Options& o) {
  const auto m = load_manifest(ctx, o);
  const double gap = o.gap_ev.value_or(m.gap());
  const auto d = levels::ctl_diagram(m, gap, o.resolution_ev);
  Report r;
  r.title = "ctl-diagram";
  r.add("gap_eV", gap);
  std::string lv;
  for (const auto& t : d.breakpoints) lv += (lv.empty() ? "" : " ") + t.label() + " " + text::sig6(t.position_ev);
  r.add("levels", lv.empty() ? "none" : lv);
  r.columns = {"E_F_eV", "charge_e", "min_Ef_eV"};
  for (const auto& s : d.samples)
    r.add_row({text::sig6(s.fermi_ev), std::to_string(s.charge), text::sig6(s.formation_ev)});
  return r;
}

Report cmd_koopmans(Context& ctx, const Options& o) {
  const double homo = ctx.scalar(o.homo_ev, "homo-ev");
  double ionization = 0.0;
  if (o.e_n_ev || o.e_n1_ev) {
    ionization = ctx.scalar(o.e_n_ev, "e-n-ev") - ctx.scalar(o.e_n1_ev, "e-n1-ev");
  } else {
    const auto m = load_manifest(ctx, o);
    const double nk = levels::koopmans_check(m, ctx.word(o.n_entry, "n-entry"),
                                             ctx.word(o.n1_entry, "n1-entry"), homo);
    ionization = homo - nk;
  }
  Report r;
  r.title = "koopmans";
  r.add("homo_eV", homo);
  r.add("ionization_eV", ionization);
  r.add("non_koopmans_eV", homo - ionization);
  return r;
}

Report cmd_kinetics(Context& ctx, const Options& o) {
  const auto net = load_network(ctx, o);
  const double p = ctx.scalar(o.power, "power");
  Report r;
  r.title = "kinetics";
  r.add("power", p);
  echo_rates(r, net.config);
  if (!o.duration_s) {
    const auto pop = kinetics::steady_state(net, p);
    r.add("pl_per_s", net.gamma_rad * pop[net.bright]);
    r.columns = {"state", "population"};
    for (std::size_t i = 0; i < net.size(); ++i)
      r.add_row({net.states[i], text::sig6(pop[static_cast<long>(i)])});
    return r;
  }
  const double t_end = *o.duration_s;
  if (o.samples < 2) throw UsageError("--samples must be at least 2");
  kinetics::IntegrateOptions io;
  for (int k = 0; k < o.samples; ++k) io.output_times.push_back(t_end * k / (o.samples - 1));
  Eigen::VectorXd p0 = Eigen::VectorXd::Zero(static_cast<long>(net.size()));
  p0[net.ground] = 1.0;
  const auto traj = kinetics::integrate(net, p0, t_end, kinetics::PiecewiseConstant::constant(p),
                                        kinetics::PiecewiseConstant::constant(0.0), io);
  r.add("duration_s", t_end);
  r.columns = {"time_s"};
  for (const auto& s : net.states) r.columns.push_back("p_" + s);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    std::vector<std::string> row{text::sig6(traj.times[k])};
    for (long i = 0; i < traj.populations[k].size(); ++i) row.push_back(text::sig6(traj.populations[k][i]));
    r.add_row(std::move(row));
  }
  return r;
}

Report cmd_pl_curve(Context& ctx, const Options& o) {
  const auto net = load_network(ctx, o);
  std::vector<double> powers = o.powers;
  if (powers.empty()) {
    if (o.points < 2) throw UsageError("--points must be at least 2");
    for (int k = 0; k < o.points; ++k) powers.push_back(o.power_max * k / (o.points - 1));
  }
  const auto curve = kinetics::pl_curve(net, powers);
  Report r;
  r.title = "pl-curve";
  echo_rates(r, net.config);
  r.columns = {"power", "pl_per_s"};
  for (const auto& [p, pl] : curve) r.add_row({p, pl});
  return r;
}

Report cmd_odmr_contrast(Context& ctx, const Options& o) {
  const auto net = load_network(ctx, o);
  const double p = ctx.scalar(o.power, "power");
  const double c = kinetics::odmr_contrast(net, o.pair, p, o.drive_per_s);
  Report r;
  r.title = "odmr-contrast";
  r.add("pair", o.pair);
  r.add("power", p);
  echo_rates(r, net.config);
  r.add("contrast", c);
  return r;
}

void configure_threads(std::ostream& err) {
  const char* env = std::getenv("DPK_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) {
    err << "warning: ignoring DPK_THREADS='" << env << "'\n";
    return;
  }
  omp_set_num_threads(static_cast<int>(n));
}

using Handler = Report (*)(Context&, const Options&);

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Defect photophysics toolkit", "dpk"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--fixtures", o.fixtures, "Directory with case-study inputs and case.conf defaults");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"plain", "table"}));
  app.add_option("-o,--output", o.output, "Write data here instead of stdout");

  std::map<CLI::App*, Handler> handlers;
  auto sub = [&](const char* name, const char* help, Handler h) {
    CLI::App* s = app.add_subcommand(name, help);
    handlers[s] = h;
    return s;
  };

  auto* ls = sub("lineshape", "PL lineshape from the generating function", cmd_lineshape);
  ls->add_option("--ground", o.ground, "Ground-state structure");
  ls->add_option("--excited", o.excited, "Excited-state structure");
  ls->add_option("--phonons", o.phonons, "Phonon basis");
  ls->add_option("--mode", o.modes, "Mode as ENERGY_MEV:S, repeatable; replaces the files");
  ls->add_option("--ezpl-ev", o.ezpl_ev, "ZPL energy (eV)");
  ls->add_option("--temperature-k", o.temperature_k, "Temperature (K)");
  ls->add_option("--zpl-fwhm-mev", o.zpl_fwhm_mev, "ZPL FWHM (meV)");
  ls->add_option("--profile", o.profile, "ZPL profile")->check(CLI::IsMember({"gaussian", "lorentzian"}));
  ls->add_option("--smearing-mev", o.smearing_mev, "Phonon Gaussian sigma (meV)");
  ls->add_option("--resolution-mev", o.resolution_mev, "Energy grid step (meV)");
  ls->add_option("--emin-ev", o.emin_ev, "Lowest emitted energy (eV)");
  ls->add_option("--emax-ev", o.emax_ev, "Highest emitted energy (eV)");
  ls->add_flag("--hr", o.hr_only, "Print the partial Huang-Rhys factors instead");

  auto* lt = sub("lifetime", "Radiative rate, lifetime and quantum yield", cmd_lifetime);
  lt->add_option("--ezpl-ev", o.ezpl_ev, "ZPL energy (eV)");
  lt->add_option("--dipole-debye", o.dipole_debye, "Transition dipole (D)");
  lt->add_option("--n", o.n_index, "Refractive index");
  lt->add_option("--orbital-i", o.orbital_i, "Initial orbital grid");
  lt->add_option("--orbital-f", o.orbital_f, "Final orbital grid");
  lt->add_option("--tau-pl-s", o.tau_pl_s, "Measured PL lifetimes (s)");

  auto* dp = sub("dipole", "Transition dipole from two orbital grids", cmd_dipole);
  dp->add_option("--orbital-i", o.orbital_i, "Initial orbital grid");
  dp->add_option("--orbital-f", o.orbital_f, "Final orbital grid");

  auto* se = sub("selection", "C2v electric-dipole selection rules", cmd_selection);
  se->add_option("--initial", o.initial_irrep, "Initial irrep");
  se->add_option("--final", o.final_irrep, "Final irrep");

  auto* zf = sub("zfs", "Spin-spin zero-field splitting", cmd_zfs);
  zf->add_option("--spin-density", o.spin_density, "Spin-density grid");
  zf->add_option("--point-spins", o.point_spins, "Point spins, one `x y z weight` per line");
  zf->add_flag("--no-error-estimate", o.no_error_estimate, "Skip the coarse-grid check");

  auto* hf = sub("hyperfine", "Hyperfine tensor at a nucleus", cmd_hyperfine);
  hf->add_option("--spin-density", o.spin_density, "Spin-density grid");
  hf->add_option("--nucleus", o.nucleus, "Isotope, e.g. 13C");
  hf->add_option("--position", o.position, "Nucleus position (Å)")->expected(3);
  hf->add_option("--g-factor", o.g_factor, "Nuclear g-factor override");
  hf->add_option("--exclusion-radius-a", o.exclusion_radius_a, "Excluded sphere radius (Å)");

  for (auto [name, help, h] : {std::tuple{"spin-levels", "Triplet sublevels", cmd_spin_levels},
                               std::tuple{"odmr", "ODMR transition frequencies", cmd_odmr}}) {
    auto* s = sub(name, help, h);
    s->add_option("--d-mhz", o.d_mhz, "D (MHz)");
    s->add_option("--e-mhz", o.e_mhz, "E (MHz)");
    s->add_option("--b-mt", o.b_mt, "Field (mT)")->expected(3);
  }

  auto* is = sub("isotope", "Probability of a spin-carrying nucleus nearby", cmd_isotope);
  is->add_option("--sites", o.sites, "Site counts per shell");
  is->add_option("--abundance", o.abundance, "Isotope abundance fraction");

  auto* lv = sub("levels", "Formation energies and transition levels", cmd_levels);
  lv->add_option("--manifest", o.manifest, "Energy manifest");
  lv->add_option("--fermi-ev", o.fermi_ev, "Fermi level above E_v (eV)");
  lv->add_option("--exciton-level-ev", o.exciton_level_ev, "(+/0) level above E_v (eV)");
  lv->add_option("--ezpl-ev", o.ezpl_ev, "ZPL energy (eV)");

  auto* cd = sub("ctl-diagram", "Stable charge state versus Fermi level", cmd_ctl_diagram);
  cd->add_option("--manifest", o.manifest, "Energy manifest");
  cd->add_option("--gap-ev", o.gap_ev, "Gap (eV); defaults to the manifest");
  cd->add_option("--resolution-ev", o.resolution_ev, "Sampling step (eV)");

  auto* kp = sub("koopmans", "Generalized Koopmans check", cmd_koopmans);
  kp->add_option("--manifest", o.manifest, "Energy manifest");
  kp->add_option("--n-entry", o.n_entry, "Entry with N electrons");
  kp->add_option("--n1-entry", o.n1_entry, "Entry with N-1 electrons");
  kp->add_option("--e-n-ev", o.e_n_ev, "E(N) (eV)");
  kp->add_option("--e-n1-ev", o.e_n1_ev, "E(N-1) (eV)");
  kp->add_option("--homo-ev", o.homo_ev, "HOMO eigenvalue (eV)");

  for (auto [name, help, h] :
       {std::tuple{"kinetics", "Steady state or time trace of the rate model", cmd_kinetics},
        std::tuple{"pl-curve", "PL versus pump power", cmd_pl_curve},
        std::tuple{"odmr-contrast", "Relative PL change under microwave drive", cmd_odmr_contrast}}) {
    auto* s = sub(name, help, h);
    s->add_option("--config", o.config, "Rate configuration");
    s->add_flag("--default-ci", o.default_ci, "Use the built-in defaults");
    if (std::string_view(name) != "pl-curve") s->add_option("--power", o.power, "Normalized pump power");
    if (std::string_view(name) == "kinetics") {
      s->add_option("--duration-s", o.duration_s, "Integrate from the ground state (s)");
      s->add_option("--samples", o.samples, "Output times for --duration-s");
    }
    if (std::string_view(name) == "pl-curve") {
      s->add_option("--powers", o.powers, "Explicit power grid");
      s->add_option("--power-max", o.power_max, "Upper end of the linear grid");
      s->add_option("--points", o.points, "Points on the linear grid");
    }
    if (std::string_view(name) == "odmr-contrast") {
      s->add_option("--pair", o.pair, "Driven pair")->check(CLI::IsMember({"T0_Tp", "T0_Tm"}));
      s->add_option("--drive-per-s", o.drive_per_s, "Drive rate override (1/s)");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    err << "dpk: " << e.what() << "\n" << app.help();
    return 2;
  }

  configure_threads(err);
  CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  try {
    Context ctx(o);
    const Report r = handlers.at(chosen)(ctx, o);
    for (const auto& w : ctx.warnings) err << "dpk " << name << ": warning: " << w << "\n";
    const auto text = report::emit_report(r, o.format == "table" ? report::Format::Table
                                                                 : report::Format::Plain);
    if (o.output.empty()) {
      out << text;
    } else {
      std::ofstream f(o.output, std::ios::binary);
      if (!f) throw UsageError("cannot write '" + o.output + "'");
      f << text;
    }
    return 0;
  } catch (const UsageError& e) {
    err << "dpk " << name << ": " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "dpk " << name << ": " << e.what() << "\n";
    return is_input_error(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    err << "dpk " << name << ": " << e.what() << "\n";
    return 1;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("dpk");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace dpk::cli
