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

#include "dpk/lineshape.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

#include "dpk/constants.hpp"
#include "dpk/error.hpp"
#include "dpk/kernels.hpp"
#include "dpk/text_io.hpp"

namespace dpk::lineshape {

namespace c = dpk::constants;
using cplx = std::complex<double>;

namespace {

constexpr std::size_t kMaxFftSize = std::size_t{1} << 24;

// In-place complex DFT. sign = FFTW_FORWARD computes Σ x_j e^(−2πi jm/N).
void fft_in_place(std::vector<cplx>& data, int sign) {
  static std::mutex planner_mutex;  // the FFTW planner is not thread-safe
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex);
    plan = fftw_plan_dft_1d(static_cast<int>(data.size()), ptr, ptr, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex);
  fftw_destroy_plan(plan);
}

double occupation(double energy_mev, double temperature_k) {
  if (temperature_k <= 0.0 || energy_mev <= 0.0) return 0.0;
  return 1.0 / std::expm1(energy_mev / (c::boltzmann_mev * temperature_k));
}

void check_options(const LineshapeOptions& o) {
  if (!(o.zpl_energy_ev > 0.0))
    throw Error(ErrorCode::NonPhysicalInput, "ZPL energy must be positive");
  if (o.temperature_k < 0.0)
    throw Error(ErrorCode::NegativeTemperature, text::shortest(o.temperature_k) + " K");
  if (!(o.zpl_width_mev > 0.0))
    throw Error(ErrorCode::SmearingNonPositive, "ZPL width must be positive");
  if (!(o.resolution_mev > 0.0))
    throw Error(ErrorCode::GridTooCoarse, "resolution must be positive");
  // The time window π/Δε must cover 20 ħ/γ to resolve the ZPL.
  if (o.resolution_mev > c::pi * o.zpl_width_mev / 20.0) {
    throw Error(ErrorCode::GridTooCoarse,
                "resolution " + text::shortest(o.resolution_mev) + " meV exceeds π·γ/20 = " +
                    text::shortest(c::pi * o.zpl_width_mev / 20.0) + " meV for γ = " +
                    text::shortest(o.zpl_width_mev) + " meV");
  }
}

// Smallest power-of-two grid whose half-span covers the sideband.
std::size_t choose_size(double max_phonon_mev, double effective_hr, double widths_mev,
                        const LineshapeOptions& o) {
  const double tail = max_phonon_mev * (effective_hr + 10.0 * std::sqrt(effective_hr) + 10.0);
  const double half_span = std::max({1000.0 * o.min_span_below_ev, 5.0 * max_phonon_mev,
                                     tail + 40.0 * widths_mev});
  std::size_t n = 1024;
  while (static_cast<double>(n) * o.resolution_mev < 2.0 * half_span) {
    n <<= 1;
    if (n > kMaxFftSize) {
      throw Error(ErrorCode::GridTooCoarse,
                  "required energy span " + text::shortest(2.0 * half_span) +
                      " meV needs more than 2^24 points at resolution " +
                      text::shortest(o.resolution_mev) + " meV");
    }
  }
  // Nyquist on the time grid: Δt = 2π/(NΔε) ≤ π/(4 ω_max).
  if (static_cast<double>(n) * o.resolution_mev < 8.0 * max_phonon_mev)
    throw Error(ErrorCode::GridTooCoarse, "time step fails Nyquist for the highest mode");
  return n;
}

double signed_time(std::size_t m, std::size_t n, double dt) {
  const auto mi = static_cast<long long>(m);
  const auto ni = static_cast<long long>(n);
  return static_cast<double>(mi <= ni / 2 ? mi : mi - ni) * dt;
}

double zpl_envelope(double t, const LineshapeOptions& o) {
  if (o.profile == ZplProfile::Gaussian) {
    const double sigma = o.zpl_width_mev / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    return std::exp(-0.5 * sigma * sigma * t * t);
  }
  return std::exp(-0.5 * o.zpl_width_mev * std::abs(t));
}

// S(t) sampled on the time grid → spectrum on the ε grid.
Spectrum finish(std::vector<cplx> correlation, double zero_time_value,
                const LineshapeOptions& o, double total_hr, double smearing) {
  const std::size_t n = correlation.size();
  const double de = o.resolution_mev;
  const double dt = 2.0 * c::pi / (static_cast<double>(n) * de);
  for (std::size_t m = 0; m < n; ++m) {
    const double t = signed_time(m, n, dt);
    correlation[m] = std::exp(correlation[m] - zero_time_value) * zpl_envelope(t, o);
  }
  fft_in_place(correlation, FFTW_BACKWARD);

  const double norm = 1.0 / (static_cast<double>(n) * de);
  std::vector<double> a(n);
  double peak = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    a[j] = correlation[j].real() * norm;
    peak = std::max(peak, a[j]);
  }
  double worst = 0.0;
  for (double& v : a) {
    if (v < 0.0) {
      worst = std::max(worst, -v);
      v = 0.0;
    }
  }
  if (worst > 1e-8 * peak) {
    throw Error(ErrorCode::GridTooCoarse,
                "negative intensity " + text::shortest(-worst) + " (peak " +
                    text::shortest(peak) + "): time grid aliasing");
  }

  Spectrum sp;
  sp.zpl_energy_ev = o.zpl_energy_ev;
  sp.total_hr = total_hr;
  sp.debye_waller = std::exp(-total_hr);
  sp.zpl_width_mev = o.zpl_width_mev;
  sp.phonon_smearing_mev = smearing;
  sp.temperature_k = o.temperature_k;
  sp.profile = o.profile;
  sp.energy_ev.reserve(n);
  sp.intensity_per_ev.reserve(n);
  // E ascending ⇔ ε descending: ε = (N/2−1)Δε … 0, then −Δε … −(N/2)Δε.
  auto emit = [&](std::size_t j) {
    const double eps = (j < n / 2 ? static_cast<double>(j)
                                  : static_cast<double>(j) - static_cast<double>(n)) * de;
    sp.energy_ev.push_back(o.zpl_energy_ev - 1e-3 * eps);
    sp.intensity_per_ev.push_back(1e3 * a[j]);
  };
  for (std::size_t j = n / 2; j-- > 0;) emit(j);
  for (std::size_t j = n; j-- > n / 2;) emit(j);
  return sp;
}

}  // namespace

HuangRhysDecomposition HuangRhysDecomposition::from_factors(
    std::span<const std::pair<double, double>> modes) {
  HuangRhysDecomposition hr;
  for (const auto& [energy, s] : modes) {
    if (!(energy >= 0.0) || !(s >= 0.0))
      throw Error(ErrorCode::NonPhysicalInput, "modes need ħω ≥ 0 and s ≥ 0");
    hr.modes.push_back({energy, energy > 0.0 ? projection_for_hr(energy, s) : 0.0, s});
    hr.total += s;
  }
  return hr;
}

double HuangRhysDecomposition::max_energy_mev() const {
  double m = 0.0;
  for (const auto& k : modes)
    if (k.s > 0.0) m = std::max(m, k.energy_mev);
  return m;
}

double hr_factor(double energy_mev, double q) {
  const double q_si = q * std::sqrt(c::atomic_mass_unit) * c::angstrom;
  return energy_mev * c::mev * q_si * q_si / (2.0 * c::hbar * c::hbar);
}

double projection_for_hr(double energy_mev, double s) {
  const double q_si = std::sqrt(2.0 * c::hbar * c::hbar * s / (energy_mev * c::mev));
  return q_si / (std::sqrt(c::atomic_mass_unit) * c::angstrom);
}

Eigen::VectorXd mass_weighted_displacement(const DefectConfiguration& ground,
                                           const DefectConfiguration& excited) {
  if (ground.size() != excited.size()) {
    throw Error(ErrorCode::AtomCountMismatch, std::to_string(ground.size()) + " vs " +
                                                  std::to_string(excited.size()) + " atoms");
  }
  const double shortest_vector = std::min(
      {ground.lattice.row(0).norm(), ground.lattice.row(1).norm(), ground.lattice.row(2).norm()});
  const auto lu = ground.lattice.transpose().partialPivLu();
  Eigen::VectorXd out(3 * ground.size());
  for (std::size_t a = 0; a < ground.size(); ++a) {
    const Atom& g = ground.atoms[a];
    const Atom& e = excited.atoms[a];
    if (g.species != e.species) {
      throw Error(ErrorCode::SpeciesMismatch, "atom " + std::to_string(a + 1) + ": " +
                                                  g.species + " vs " + e.species);
    }
    Vec3 frac = lu.solve(Vec3(e.position - g.position));
    for (int i = 0; i < 3; ++i) frac[i] -= std::round(frac[i]);
    const Vec3 d = ground.lattice.transpose() * frac;
    if (d.norm() > 0.5 * shortest_vector) {
      throw Error(ErrorCode::DisplacementTooLarge,
                  "atom " + std::to_string(a + 1) + " moves " + text::shortest(d.norm()) +
                      " Å (limit " + text::shortest(0.5 * shortest_vector) + " Å)");
    }
    out.segment<3>(3 * static_cast<Eigen::Index>(a)) = std::sqrt(g.mass_amu) * d;
  }
  return out;
}

HuangRhysDecomposition partial_hr_factors(const Eigen::VectorXd& displacement,
                                          const PhononBasis& basis, double zero_mode_tolerance) {
  if (static_cast<std::size_t>(displacement.size()) != 3 * basis.natoms) {
    throw Error(ErrorCode::DimensionMismatch,
                "displacement has " + std::to_string(displacement.size()) +
                    " components, basis expects " + std::to_string(3 * basis.natoms));
  }
  HuangRhysDecomposition hr;
  hr.modes.reserve(basis.size());
  const Eigen::VectorXd q = basis.eigenvectors.transpose() * displacement;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    HrMode m;
    m.energy_mev = basis.energies_mev[k];
    m.q = q[static_cast<Eigen::Index>(k)];
    if (basis.is_zero_mode(k)) {
      if (std::abs(m.q) > zero_mode_tolerance) {
        throw Error(ErrorCode::ZeroFrequencyMode,
                    "mode " + std::to_string(basis.mode_index[k]) + " has ω = 0 but q = " +
                        text::shortest(m.q) + " (translation contamination)");
      }
      m.s = 0.0;
    } else {
      m.s = hr_factor(m.energy_mev, m.q);
    }
    hr.total += m.s;
    hr.modes.push_back(m);
  }
  return hr;
}

double debye_waller(const HuangRhysDecomposition& hr) { return std::exp(-hr.total); }

double SpectralDensity::area() const {
  if (values.size() < 2) return 0.0;
  double sum = 0.5 * (values.front() + values.back());
  for (std::size_t j = 1; j + 1 < values.size(); ++j) sum += values[j];
  return sum * step_mev;
}

SpectralDensity spectral_density(const HuangRhysDecomposition& hr, double smearing_mev,
                                 double step_mev, double max_energy_mev) {
  if (!(smearing_mev > 0.0))
    throw Error(ErrorCode::SmearingNonPositive, text::shortest(smearing_mev) + " meV");
  if (!(step_mev > 0.0)) throw Error(ErrorCode::GridTooCoarse, "step must be positive");
  if (max_energy_mev <= 0.0) max_energy_mev = hr.max_energy_mev() + 10.0 * smearing_mev;
  const auto n = static_cast<std::size_t>(std::ceil(max_energy_mev / step_mev)) + 1;

  SpectralDensity sd;
  sd.step_mev = step_mev;
  sd.smearing_mev = smearing_mev;
  sd.values.assign(n, 0.0);
  const double norm = 1.0 / (smearing_mev * std::sqrt(2.0 * c::pi));
  for (const auto& m : hr.modes) {
    if (m.s == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const double x = (sd.energy(j) - m.energy_mev) / smearing_mev;
      if (std::abs(x) > 12.0) continue;
      sd.values[j] += m.s * norm * std::exp(-0.5 * x * x);
    }
  }
  return sd;
}

Spectrum generating_function_spectrum(const HuangRhysDecomposition& hr,
                                      const LineshapeOptions& o) {
  check_options(o);
  if (!(o.phonon_smearing_mev > 0.0))
    throw Error(ErrorCode::SmearingNonPositive, "phonon smearing must be positive");

  std::vector<kernels::ModeTerm> terms;
  double effective = 0.0;
  for (const auto& m : hr.modes) {
    if (m.s == 0.0 || m.energy_mev <= 0.0) continue;
    const double n = occupation(m.energy_mev, o.temperature_k);
    terms.push_back({m.energy_mev, m.s, n});
    effective += m.s * (2.0 * n + 1.0);
  }
  const double widths = o.zpl_width_mev + o.phonon_smearing_mev;
  const std::size_t n = choose_size(hr.max_energy_mev(), effective, widths, o);
  const double dt = 2.0 * c::pi / (static_cast<double>(n) * o.resolution_mev);
  std::vector<double> times(n);
  for (std::size_t m = 0; m < n; ++m) times[m] = signed_time(m, n, dt);
  std::vector<cplx> corr(n);
  kernels::mode_correlation(terms, times, o.phonon_smearing_mev, corr);
  const cplx zero_time = corr[0];
  return finish(std::move(corr), zero_time.real(), o, hr.total, o.phonon_smearing_mev);
}

Spectrum generating_function_spectrum(const SpectralDensity& density,
                                      const LineshapeOptions& o) {
  check_options(o);
  if (std::abs(density.step_mev - o.resolution_mev) > 1e-12 * o.resolution_mev) {
    throw Error(ErrorCode::GridTooCoarse, "spectral density step " +
                                              text::shortest(density.step_mev) +
                                              " meV differs from resolution " +
                                              text::shortest(o.resolution_mev) + " meV");
  }
  double max_energy = 0.0, effective = 0.0, total = 0.0;
  for (std::size_t j = 0; j < density.values.size(); ++j) {
    const double w = density.values[j] * density.step_mev;
    if (w == 0.0) continue;
    max_energy = density.energy(j);
    effective += w * (2.0 * occupation(density.energy(j), o.temperature_k) + 1.0);
    total += w;
  }
  const std::size_t n = choose_size(max_energy, effective, o.zpl_width_mev, o);
  if (density.values.size() > n / 2)
    throw Error(ErrorCode::GridTooCoarse, "spectral density extends past the energy window");

  // a[j] at +ε_j carries (n+1)·S, a[N−j] at −ε_j carries n·S; the forward
  // DFT then gives S(t_m) = Σ_j S_j Δε [(n+1)e^(−iε_j t) + n e^(iε_j t)].
  std::vector<cplx> a(n, cplx(0.0, 0.0));
  for (std::size_t j = 0; j < density.values.size(); ++j) {
    const double w = density.values[j] * density.step_mev;
    const double occ = occupation(density.energy(j), o.temperature_k);
    a[j] += (occ + 1.0) * w;
    if (j > 0 && occ > 0.0) a[n - j] += occ * w;
  }
  fft_in_place(a, FFTW_FORWARD);
  const double zero_time = a[0].real();
  return finish(std::move(a), zero_time, o, total, density.smearing_mev);
}

double Spectrum::peak() const {
  return intensity_per_ev.empty()
             ? 0.0
             : *std::max_element(intensity_per_ev.begin(), intensity_per_ev.end());
}

double Spectrum::integral() const {
  if (energy_ev.size() < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 1; i < energy_ev.size(); ++i)
    sum += 0.5 * (intensity_per_ev[i] + intensity_per_ev[i - 1]) * (energy_ev[i] - energy_ev[i - 1]);
  return sum;
}

double Spectrum::integrate(double lo_ev, double hi_ev) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < energy_ev.size(); ++i)
    if (energy_ev[i] >= lo_ev && energy_ev[i] <= hi_ev) sum += intensity_per_ev[i];
  return sum * step_ev();
}

double Spectrum::interpolate(double e) const {
  if (energy_ev.size() < 2 || e < energy_ev.front() || e > energy_ev.back()) return 0.0;
  const double x = (e - energy_ev.front()) / step_ev();
  auto i = static_cast<std::size_t>(std::floor(x));
  if (i + 1 >= energy_ev.size()) return intensity_per_ev.back();
  const double f = x - static_cast<double>(i);
  return (1.0 - f) * intensity_per_ev[i] + f * intensity_per_ev[i + 1];
}

std::string serialize(const Spectrum& sp) {
  std::string out;
  out += "# zpl_energy_eV = " + text::sig6(sp.zpl_energy_ev) + "\n";
  out += "# S_tot = " + text::sig6(sp.total_hr) + "\n";
  out += "# debye_waller = " + text::sig6(sp.debye_waller) + "\n";
  out += "# zpl_width_meV = " + text::sig6(sp.zpl_width_mev) + " (" +
         (sp.profile == ZplProfile::Gaussian ? "gaussian" : "lorentzian") + " FWHM)\n";
  out += "# phonon_smearing_meV = " + text::sig6(sp.phonon_smearing_mev) + "\n";
  out += "# temperature_K = " + text::sig6(sp.temperature_k) + "\n";
  out += "# energy_eV intensity_per_eV\n";
  for (std::size_t i = 0; i < sp.energy_ev.size(); ++i)
    out += text::sig6(sp.energy_ev[i]) + " " + text::sig6(sp.intensity_per_ev[i]) + "\n";
  return out;
}

}  // namespace dpk::lineshape
