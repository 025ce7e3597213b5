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

#include "dpk/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "dpk/error.hpp"
#include "dpk/text_io.hpp"

namespace dpk {

using text::Line;
using text::malformed;
using text::shortest;
using text::to_double;
using text::to_int;

namespace {

constexpr std::string_view kElements[] = {
    "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg", "Al", "Si", "P",
    "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn",
    "Ga", "Ge", "As", "Se", "Br", "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh",
    "Pd", "Ag", "Cd", "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd",
    "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W",  "Re",
    "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th",
    "Pa", "U",  "Np", "Pu", "Am", "Cm", "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db",
    "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og"};

std::string line_ref(std::size_t line) { return "line " + std::to_string(line); }

// Cursor over the significant lines of a document.
class Cursor {
 public:
  explicit Cursor(std::vector<Line> lines) : lines_(std::move(lines)) {}

  const Line& next(std::string_view expecting) {
    if (pos_ >= lines_.size()) {
      std::size_t last = lines_.empty() ? 0 : lines_.back().number;
      malformed(last + 1, "<eof>", "unexpected end of input, expected " +
                                        std::string(expecting));
    }
    return lines_[pos_++];
  }
  bool done() const { return pos_ >= lines_.size(); }
  const Line& peek() const { return lines_[pos_]; }

  void expect_end() const {
    if (!done()) {
      const Line& l = lines_[pos_];
      throw Error(ErrorCode::TrailingData, line_ref(l.number) +
                                               ": unexpected content after a complete document ('" +
                                               std::string(l.tokens.front()) + "')");
    }
  }

 private:
  std::vector<Line> lines_;
  std::size_t pos_ = 0;
};

void expect_tokens(const Line& line, std::size_t n, std::string_view what) {
  if (line.tokens.size() != n) {
    std::string_view tok = line.tokens.size() > n ? line.tokens[n] : line.tokens.back();
    malformed(line.number, tok,
              "expected " + std::to_string(n) + " fields for " + std::string(what));
  }
}

void expect_keyword(const Line& line, std::string_view keyword) {
  if (line.tokens.front() != keyword)
    malformed(line.number, line.tokens.front(), "expected '" + std::string(keyword) + "'");
}

Vec3 read_vec3(const Line& line, std::size_t first) {
  return Vec3(to_double(line.tokens[first], line.number),
              to_double(line.tokens[first + 1], line.number),
              to_double(line.tokens[first + 2], line.number));
}

std::string vec3_text(const Vec3& v) {
  return shortest(v.x()) + " " + shortest(v.y()) + " " + shortest(v.z());
}

std::string extract_label(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    auto pos = line.find_first_not_of(" \t");
    if (pos == std::string::npos || line[pos] != '#') continue;
    auto body = line.substr(pos + 1);
    auto b = body.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    body = body.substr(b);
    if (body.rfind("label:", 0) == 0) {
      body = body.substr(6);
      auto s = body.find_first_not_of(" \t");
      auto e = body.find_last_not_of(" \t\r");
      return s == std::string::npos ? std::string() : body.substr(s, e - s + 1);
    }
  }
  return {};
}

// key=value token split; returns false if the token is not of that form.
bool split_kv(std::string_view token, std::string_view& key, std::string_view& value) {
  auto eq = token.find('=');
  if (eq == std::string_view::npos || eq == 0) return false;
  key = token.substr(0, eq);
  value = token.substr(eq + 1);
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// Structures

bool is_known_element(std::string_view symbol) {
  return std::find(std::begin(kElements), std::end(kElements), symbol) != std::end(kElements);
}

Vec3 DefectConfiguration::to_fractional(const Vec3& cartesian) const {
  // cartesian = lattice^T * fractional
  return lattice.transpose().partialPivLu().solve(cartesian);
}

void validate(const DefectConfiguration& config) {
  const double scale =
      config.lattice.row(0).norm() * config.lattice.row(1).norm() * config.lattice.row(2).norm();
  if (!config.lattice.allFinite())
    throw Error(ErrorCode::NonFiniteValue, "lattice contains a non-finite component");
  if (!(scale > 0.0) || std::abs(config.lattice.determinant()) <= 1e-10 * scale)
    throw Error(ErrorCode::SingularLattice, "lattice vectors are linearly dependent (det = " +
                                                shortest(config.lattice.determinant()) + ")");
  if (config.atoms.empty()) throw Error(ErrorCode::MalformedLine, "structure has no atoms");
  for (std::size_t i = 0; i < config.atoms.size(); ++i) {
    const Atom& a = config.atoms[i];
    if (!is_known_element(a.species))
      throw Error(ErrorCode::UnknownSpecies, "atom " + std::to_string(i + 1) + ": '" +
                                                 a.species + "'");
    if (!std::isfinite(a.mass_amu) || !a.position.allFinite())
      throw Error(ErrorCode::NonFiniteValue, "atom " + std::to_string(i + 1));
    if (!(a.mass_amu > 0.0))
      throw Error(ErrorCode::MalformedLine, "atom " + std::to_string(i + 1) +
                                                ": mass must be positive ('" +
                                                shortest(a.mass_amu) + "')");
  }
}

DefectConfiguration parse_structure(std::string_view text) {
  Cursor cur(text::split_lines(text));
  DefectConfiguration config;
  config.label = extract_label(text);

  const Line& head = cur.next("'lattice'");
  expect_keyword(head, "lattice");
  expect_tokens(head, 1, "'lattice'");
  for (int r = 0; r < 3; ++r) {
    const Line& l = cur.next("lattice vector");
    expect_tokens(l, 3, "a lattice vector");
    config.lattice.row(r) = read_vec3(l, 0).transpose();
  }
  const Line& charge = cur.next("'charge <int>'");
  expect_keyword(charge, "charge");
  expect_tokens(charge, 2, "'charge <int>'");
  config.charge = static_cast<int>(to_int(charge.tokens[1], charge.number));

  const Line& atoms = cur.next("'atoms <N>'");
  expect_keyword(atoms, "atoms");
  expect_tokens(atoms, 2, "'atoms <N>'");
  const long long n = to_int(atoms.tokens[1], atoms.number);
  if (n < 1) malformed(atoms.number, atoms.tokens[1], "atom count must be at least 1");

  config.atoms.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    const Line& l = cur.next("an atom line 'SYMBOL mass x y z'");
    expect_tokens(l, 5, "an atom line 'SYMBOL mass x y z'");
    Atom a;
    a.species = std::string(l.tokens[0]);
    if (!is_known_element(a.species))
      throw Error(ErrorCode::UnknownSpecies, line_ref(l.number) + ": '" + a.species + "'");
    a.mass_amu = to_double(l.tokens[1], l.number);
    if (!(a.mass_amu > 0.0)) malformed(l.number, l.tokens[1], "mass must be positive");
    a.position = read_vec3(l, 2);
    config.atoms.push_back(std::move(a));
  }
  cur.expect_end();
  validate(config);
  return config;
}

std::string serialize(const DefectConfiguration& config) {
  std::string out;
  if (!config.label.empty()) out += "# label: " + config.label + "\n";
  out += "lattice\n";
  for (int r = 0; r < 3; ++r) out += vec3_text(config.lattice.row(r).transpose()) + "\n";
  out += "charge " + std::to_string(config.charge) + "\n";
  out += "atoms " + std::to_string(config.atoms.size()) + "\n";
  for (const Atom& a : config.atoms)
    out += a.species + " " + shortest(a.mass_amu) + " " + vec3_text(a.position) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Phonons

bool PhononBasis::is_zero_mode(std::size_t k) const { return energies_mev[k] == 0.0; }

std::size_t PhononBasis::zero_mode_count() const {
  return static_cast<std::size_t>(
      std::count(energies_mev.begin(), energies_mev.end(), 0.0));
}

PhononBasis parse_phonons(std::string_view text, const PhononParseOptions& options) {
  Cursor cur(text::split_lines(text));
  const Line& head = cur.next("'phonons <natoms> <nmodes>'");
  expect_keyword(head, "phonons");
  expect_tokens(head, 3, "'phonons <natoms> <nmodes>'");
  const long long natoms = to_int(head.tokens[1], head.number);
  const long long nmodes = to_int(head.tokens[2], head.number);
  if (natoms < 1) malformed(head.number, head.tokens[1], "natoms must be at least 1");
  if (nmodes < 1 || nmodes > 3 * natoms) {
    throw Error(ErrorCode::DimensionMismatch,
                line_ref(head.number) + ": mode count " + std::to_string(nmodes) +
                    " incompatible with " + std::to_string(natoms) + " atoms (max " +
                    std::to_string(3 * natoms) + ")");
  }

  PhononBasis basis;
  basis.natoms = static_cast<std::size_t>(natoms);
  basis.eigenvectors.resize(3 * natoms, nmodes);
  basis.energies_mev.reserve(static_cast<std::size_t>(nmodes));
  for (long long k = 0; k < nmodes; ++k) {
    if (cur.done()) {
      throw Error(ErrorCode::DimensionMismatch, "header declares " + std::to_string(nmodes) +
                                                    " modes, file has " + std::to_string(k));
    }
    const Line& ml = cur.next("'mode <k> <freq_meV>'");
    if (ml.tokens.front() != "mode") {
      throw Error(ErrorCode::DimensionMismatch,
                  line_ref(ml.number) + ": expected 'mode' header for mode " +
                      std::to_string(k + 1) + " but found '" + std::string(ml.tokens.front()) +
                      "' (eigenvector length inconsistent with natoms)");
    }
    expect_tokens(ml, 3, "'mode <k> <freq_meV>'");
    const int index = static_cast<int>(to_int(ml.tokens[1], ml.number));
    if (!basis.mode_index.empty() && index <= basis.mode_index.back())
      malformed(ml.number, ml.tokens[1], "mode indices must be strictly increasing");
    double energy = to_double(ml.tokens[2], ml.number);
    if (energy < -options.zero_mode_threshold_mev) {
      throw Error(ErrorCode::ImaginaryMode, line_ref(ml.number) + ": mode " +
                                                std::to_string(index) + " has frequency " +
                                                std::string(ml.tokens[2]) + " meV");
    }
    if (std::abs(energy) <= options.zero_mode_threshold_mev) energy = 0.0;
    basis.mode_index.push_back(index);
    basis.energies_mev.push_back(energy);
    for (long long a = 0; a < natoms; ++a) {
      if (cur.done() || cur.peek().tokens.front() == "mode") {
        throw Error(ErrorCode::DimensionMismatch,
                    "mode " + std::to_string(index) + " has " + std::to_string(a) +
                        " eigenvector rows, expected " + std::to_string(natoms));
      }
      const Line& l = cur.next("eigenvector components");
      if (l.tokens.size() != 3) {
        throw Error(ErrorCode::DimensionMismatch,
                    line_ref(l.number) + ": eigenvector row for atom " + std::to_string(a + 1) +
                        " of mode " + std::to_string(index) + " must have 3 components");
      }
      basis.eigenvectors.block<3, 1>(3 * a, k) = read_vec3(l, 0);
    }
  }
  if (!cur.done() && cur.peek().tokens.size() == 3 && cur.peek().tokens.front() != "mode") {
    throw Error(ErrorCode::DimensionMismatch,
                line_ref(cur.peek().number) + ": more eigenvector rows than natoms");
  }
  cur.expect_end();

  // Orthonormality: E^T E = I.
  const Eigen::MatrixXd gram = basis.eigenvectors.transpose() * basis.eigenvectors;
  double worst = 0.0;
  Eigen::Index wi = 0, wj = 0;
  for (Eigen::Index j = 0; j < gram.cols(); ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double dev = std::abs(gram(i, j) - (i == j ? 1.0 : 0.0));
      if (dev > worst) {
        worst = dev;
        wi = i;
        wj = j;
      }
    }
  }
  if (worst > options.orthonormality_tolerance) {
    throw Error(ErrorCode::NonOrthonormal,
                "modes " + std::to_string(basis.mode_index[wi]) + " and " +
                    std::to_string(basis.mode_index[wj]) + " deviate by " + shortest(worst));
  }
  return basis;
}

std::string serialize(const PhononBasis& basis) {
  std::string out = "phonons " + std::to_string(basis.natoms) + " " +
                    std::to_string(basis.size()) + "\n";
  for (std::size_t k = 0; k < basis.size(); ++k) {
    out += "mode " + std::to_string(basis.mode_index[k]) + " " +
           shortest(basis.energies_mev[k]) + "\n";
    for (std::size_t a = 0; a < basis.natoms; ++a) {
      out += vec3_text(basis.eigenvectors.block<3, 1>(3 * a, static_cast<Eigen::Index>(k)));
      out += "\n";
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grids

std::string_view to_string(FieldKind kind) {
  return kind == FieldKind::SpinDensity ? "spin_density" : "orbital";
}

double ScalarField::measured_norm() const {
  double sum = 0.0;
  if (kind == FieldKind::SpinDensity) {
    for (double v : values) sum += v;
    return sum * voxel_volume();
  }
  for (double v : values) sum += v * v;
  return std::sqrt(sum * voxel_volume());
}

bool ScalarField::same_grid(const ScalarField& other, double tolerance) const {
  return counts == other.counts && (origin - other.origin).norm() <= tolerance &&
         (axes - other.axes).norm() <= tolerance;
}

void check_normalization(const ScalarField& field, Warnings* warnings,
                         const GridParseOptions& options) {
  const double measured = field.measured_norm();
  const double expected = field.expected_norm;
  const double deviation =
      expected != 0.0 ? std::abs(measured - expected) / std::abs(expected) : std::abs(measured);
  if (!(deviation <= options.error_fraction)) {
    throw Error(ErrorCode::NormalizationError,
                std::string(to_string(field.kind)) + " measured " + shortest(measured) +
                    ", expected " + shortest(expected));
  }
  if (deviation > options.warn_fraction && warnings) {
    warnings->push_back("normalization deviates by " + text::sig6(100.0 * deviation) +
                        "% (measured " + text::sig6(measured) + ", expected " +
                        text::sig6(expected) + ")");
  }
}

ScalarField parse_grid(std::string_view text, Warnings* warnings,
                       const GridParseOptions& options) {
  // Header lines are tokenized line-wise; the value body is free-form.
  auto lines = text::split_lines(text);
  if (lines.size() < 5)
    malformed(lines.empty() ? 1 : lines.back().number + 1, "<eof>",
              "grid needs a header, origin and three axes");

  ScalarField field;
  const Line& head = lines[0];
  expect_keyword(head, "grid");
  expect_tokens(head, 6, "'grid <NX> <NY> <NZ> <kind> <expected_norm>'");
  for (int d = 0; d < 3; ++d) {
    const long long n = to_int(head.tokens[1 + d], head.number);
    if (n < 2) malformed(head.number, head.tokens[1 + d], "grid counts must be at least 2");
    field.counts[d] = static_cast<std::size_t>(n);
  }
  if (head.tokens[4] == "spin_density") {
    field.kind = FieldKind::SpinDensity;
  } else if (head.tokens[4] == "orbital") {
    field.kind = FieldKind::Orbital;
  } else {
    malformed(head.number, head.tokens[4], "kind must be spin_density or orbital");
  }
  field.expected_norm = to_double(head.tokens[5], head.number);

  const Line& origin = lines[1];
  expect_keyword(origin, "origin");
  expect_tokens(origin, 4, "'origin x y z'");
  field.origin = read_vec3(origin, 1);
  for (int d = 0; d < 3; ++d) {
    const Line& l = lines[2 + d];
    expect_keyword(l, "axis" + std::to_string(d + 1));
    expect_tokens(l, 4, "an axis line");
    field.axes.row(d) = read_vec3(l, 1).transpose();
  }
  if (std::abs(field.axes.determinant()) <= 0.0)
    throw Error(ErrorCode::SingularLattice, "grid axes are linearly dependent");

  const std::size_t expected = field.counts[0] * field.counts[1] * field.counts[2];
  field.values.reserve(expected);
  std::size_t seen = 0;
  for (std::size_t i = 5; i < lines.size(); ++i) {
    for (std::string_view tok : lines[i].tokens) {
      ++seen;
      const double v = to_double(tok, lines[i].number);
      if (field.values.size() < expected) field.values.push_back(v);
    }
  }
  if (seen != expected) {
    throw Error(ErrorCode::CountMismatch, "header declares " + std::to_string(expected) +
                                              " values, body has " + std::to_string(seen));
  }
  check_normalization(field, warnings, options);
  return field;
}

std::string serialize(const ScalarField& field) {
  std::string out = "grid " + std::to_string(field.counts[0]) + " " +
                    std::to_string(field.counts[1]) + " " + std::to_string(field.counts[2]) +
                    " " + std::string(to_string(field.kind)) + " " +
                    shortest(field.expected_norm) + "\n";
  out += "origin " + vec3_text(field.origin) + "\n";
  for (int d = 0; d < 3; ++d)
    out += "axis" + std::to_string(d + 1) + " " + vec3_text(field.axes.row(d).transpose()) + "\n";
  // One z-column per line.
  const std::size_t nz = field.counts[2];
  for (std::size_t i = 0; i < field.values.size(); i += nz) {
    for (std::size_t j = 0; j < nz; ++j) {
      if (j) out += ' ';
      out += shortest(field.values[i + j]);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Manifests

const ManifestEntry* EnergyManifest::find(std::string_view label) const {
  for (const auto& e : entries)
    if (e.label == label) return &e;
  return nullptr;
}

EnergyManifest parse_manifest(std::string_view text) {
  EnergyManifest m;
  bool have_bulk = false, have_ev = false, have_ec = false;
  std::set<std::string> labels;

  for (const Line& l : text::split_lines(text)) {
    const auto& t = l.tokens;
    if (t.front() == "entry") {
      if (t.size() < 2) malformed(l.number, t.front(), "entry needs a label");
      ManifestEntry e;
      e.label = std::string(t[1]);
      if (!labels.insert(e.label).second)
        malformed(l.number, t[1], "duplicate entry label");
      bool have_charge = false, have_energy = false;
      for (std::size_t i = 2; i < t.size(); ++i) {
        std::string_view key, value;
        if (!split_kv(t[i], key, value)) malformed(l.number, t[i], "expected key=value");
        if (key == "charge") {
          e.charge = static_cast<int>(to_int(value, l.number));
          have_charge = true;
        } else if (key == "energy") {
          e.energy_ev = to_double(value, l.number);
          have_energy = true;
        } else if (key == "corr") {
          e.correction_ev = to_double(value, l.number);
        } else if (key.substr(0, 3) == "dn.") {
          std::string species(key.substr(3));
          if (!is_known_element(species))
            throw Error(ErrorCode::UnknownSpecies,
                        line_ref(l.number) + ": '" + species + "'");
          e.added_atoms[species] = static_cast<int>(to_int(value, l.number));
        } else {
          malformed(l.number, t[i], "unknown entry field");
        }
      }
      if (!have_charge)
        throw Error(ErrorCode::MissingKey, line_ref(l.number) + ": charge (entry " + e.label + ")");
      if (!have_energy)
        throw Error(ErrorCode::MissingKey, line_ref(l.number) + ": energy (entry " + e.label + ")");
      m.entries.push_back(std::move(e));
      continue;
    }
    if (t.front() == "level") {
      if (!l.indented || m.entries.empty())
        malformed(l.number, t.front(), "level lines must be indented under an entry");
      if (t.size() < 2) malformed(l.number, t.front(), "level needs an energy");
      EigenLevel lev;
      lev.energy_ev = to_double(t[1], l.number);
      bool have_occ = false, have_w = false;
      for (std::size_t i = 2; i < t.size(); ++i) {
        std::string_view key, value;
        if (!split_kv(t[i], key, value)) malformed(l.number, t[i], "expected key=value");
        if (key == "occ") {
          lev.occupation = to_double(value, l.number);
          have_occ = true;
        } else if (key == "kweight") {
          lev.kweight = to_double(value, l.number);
          have_w = true;
        } else if (key == "k") {
          lev.kpoint = static_cast<int>(to_int(value, l.number));
        } else {
          malformed(l.number, t[i], "unknown level field");
        }
      }
      if (!have_occ) throw Error(ErrorCode::MissingKey, line_ref(l.number) + ": occ");
      if (!have_w) throw Error(ErrorCode::MissingKey, line_ref(l.number) + ": kweight");
      if (lev.occupation < 0.0 || lev.occupation > 2.0)
        throw Error(ErrorCode::InvalidOccupation,
                    line_ref(l.number) + ": occupation " + shortest(lev.occupation));
      if (lev.kweight < 0.0)
        throw Error(ErrorCode::InvalidOccupation,
                    line_ref(l.number) + ": negative k-point weight");
      m.entries.back().levels.push_back(lev);
      continue;
    }
    // key = value
    if (t.size() != 3 || t[1] != "=") malformed(l.number, t.front(), "expected 'key = value'");
    const std::string key(t[0]);
    if (key == "bulk_energy") {
      m.bulk_energy_ev = to_double(t[2], l.number);
      have_bulk = true;
    } else if (key == "e_v") {
      m.valence_band_ev = to_double(t[2], l.number);
      have_ev = true;
    } else if (key == "e_c") {
      m.conduction_band_ev = to_double(t[2], l.number);
      have_ec = true;
    } else if (key.rfind("mu.", 0) == 0) {
      std::string species = key.substr(3);
      if (!is_known_element(species))
        throw Error(ErrorCode::UnknownSpecies, line_ref(l.number) + ": '" + species + "'");
      m.chemical_potentials_ev[species] = to_double(t[2], l.number);
    } else {
      m.metadata[key] = std::string(t[2]);
    }
  }

  if (!have_bulk) throw Error(ErrorCode::MissingKey, "bulk_energy");
  if (!have_ev) throw Error(ErrorCode::MissingKey, "e_v");
  if (!have_ec) throw Error(ErrorCode::MissingKey, "e_c");
  if (m.entries.empty()) throw Error(ErrorCode::MissingKey, "entry (at least one defect entry)");
  if (!(m.conduction_band_ev > m.valence_band_ev)) {
    throw Error(ErrorCode::GapInverted, "e_c = " + shortest(m.conduction_band_ev) +
                                            " is not above e_v = " + shortest(m.valence_band_ev));
  }
  for (const auto& e : m.entries) {
    if (e.levels.empty()) continue;
    std::map<int, double> weights;
    for (const auto& lev : e.levels) {
      auto [it, inserted] = weights.emplace(lev.kpoint, lev.kweight);
      if (!inserted && it->second != lev.kweight)
        throw Error(ErrorCode::InvalidOccupation,
                    "entry " + e.label + ": inconsistent weights for k-point " +
                        std::to_string(lev.kpoint));
    }
    double total = 0.0;
    for (const auto& [k, w] : weights) total += w;
    if (std::abs(total - 1.0) > 1e-9)
      throw Error(ErrorCode::InvalidOccupation,
                  "entry " + e.label + ": k-point weights sum to " + shortest(total));
  }
  return m;
}

std::string serialize(const EnergyManifest& m) {
  std::string out;
  out += "bulk_energy = " + shortest(m.bulk_energy_ev) + "\n";
  out += "e_v = " + shortest(m.valence_band_ev) + "\n";
  out += "e_c = " + shortest(m.conduction_band_ev) + "\n";
  for (const auto& [sp, mu] : m.chemical_potentials_ev) out += "mu." + sp + " = " + shortest(mu) + "\n";
  for (const auto& [k, v] : m.metadata) out += k + " = " + v + "\n";
  for (const auto& e : m.entries) {
    out += "entry " + e.label + " charge=" + std::to_string(e.charge) +
           " energy=" + shortest(e.energy_ev) + " corr=" + shortest(e.correction_ev);
    for (const auto& [sp, n] : e.added_atoms) out += " dn." + sp + "=" + std::to_string(n);
    out += "\n";
    for (const auto& lev : e.levels) {
      out += "  level " + shortest(lev.energy_ev) + " occ=" + shortest(lev.occupation) +
             " kweight=" + shortest(lev.kweight) + " k=" + std::to_string(lev.kpoint) + "\n";
    }
  }
  return out;
}

}  // namespace dpk
