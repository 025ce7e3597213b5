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

#include "dpk/text_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dpk/error.hpp"

namespace dpk {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
#define DPK_CASE(x) \
  case ErrorCode::x: \
    return #x;
    DPK_CASE(MalformedLine)
    DPK_CASE(NonFiniteValue)
    DPK_CASE(SingularLattice)
    DPK_CASE(UnknownSpecies)
    DPK_CASE(DimensionMismatch)
    DPK_CASE(ImaginaryMode)
    DPK_CASE(NonOrthonormal)
    DPK_CASE(CountMismatch)
    DPK_CASE(NormalizationError)
    DPK_CASE(MissingKey)
    DPK_CASE(InvalidOccupation)
    DPK_CASE(GapInverted)
    DPK_CASE(TrailingData)
    DPK_CASE(AtomCountMismatch)
    DPK_CASE(SpeciesMismatch)
    DPK_CASE(DisplacementTooLarge)
    DPK_CASE(ZeroFrequencyMode)
    DPK_CASE(SmearingNonPositive)
    DPK_CASE(GridTooCoarse)
    DPK_CASE(NegativeTemperature)
    DPK_CASE(GridMismatch)
    DPK_CASE(KindMismatch)
    DPK_CASE(NonPhysicalInput)
    DPK_CASE(OrderViolation)
    DPK_CASE(WrongTotalSpin)
    DPK_CASE(NucleusOutsideGrid)
    DPK_CASE(ExclusionRadiusTooLarge)
    DPK_CASE(FieldTooLarge)
    DPK_CASE(MissingChemicalPotential)
    DPK_CASE(UnknownEntry)
    DPK_CASE(SameCharge)
    DPK_CASE(LevelOutsideGap)
    DPK_CASE(SelectionRuleViolation)
    DPK_CASE(NegativeRate)
    DPK_CASE(Reducible)
    DPK_CASE(NonConvergent)
    DPK_CASE(StepFailure)
    DPK_CASE(NoSuchPair)
    DPK_CASE(InvalidPopulation)
    DPK_CASE(UnknownState)
#undef DPK_CASE
  }
  return "UnknownError";
}

bool is_input_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedLine:
    case ErrorCode::NonFiniteValue:
    case ErrorCode::SingularLattice:
    case ErrorCode::UnknownSpecies:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::ImaginaryMode:
    case ErrorCode::NonOrthonormal:
    case ErrorCode::CountMismatch:
    case ErrorCode::NormalizationError:
    case ErrorCode::MissingKey:
    case ErrorCode::InvalidOccupation:
    case ErrorCode::GapInverted:
    case ErrorCode::TrailingData:
      return true;
    default:
      return false;
  }
}

namespace text {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

}  // namespace

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    std::string_view raw = text.substr(pos, end - pos);
    if (auto hash = raw.find('#'); hash != std::string_view::npos)
      raw = raw.substr(0, hash);
    while (!raw.empty() && is_space(raw.back())) raw.remove_suffix(1);
    if (!raw.empty()) {
      Line line;
      line.number = number;
      line.indented = is_space(raw.front());
      line.raw = raw;
      line.tokens = split_ws(raw);
      if (!line.tokens.empty()) lines.push_back(std::move(line));
    }
    if (end == text.size()) break;
    pos = end + 1;
  }
  return lines;
}

void malformed(std::size_t line, std::string_view token, std::string_view what) {
  throw Error(ErrorCode::MalformedLine,
              "line " + std::to_string(line) + ": " + std::string(what) +
                  " (token '" + std::string(token) + "')");
}

double to_double(std::string_view token, std::size_t line) {
  std::string_view t = token;
  if (!t.empty() && t.front() == '+') t.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec == std::errc::result_out_of_range) {
    throw Error(ErrorCode::NonFiniteValue,
                "line " + std::to_string(line) + ": value out of range '" +
                    std::string(token) + "'");
  }
  if (ec != std::errc() || ptr != t.data() + t.size())
    malformed(line, token, "expected a number");
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::NonFiniteValue,
                "line " + std::to_string(line) + ": non-finite value '" +
                    std::string(token) + "'");
  }
  return value;
}

long long to_int(std::string_view token, std::size_t line) {
  std::string_view t = token;
  if (!t.empty() && t.front() == '+') t.remove_prefix(1);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size())
    malformed(line, token, "expected an integer");
  return value;
}

std::string shortest(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), ptr);
}

std::string sig6(double value) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.6g", value);
  std::string s(buf.data());
  if (s == "-0") s = "0";
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace text
}  // namespace dpk
