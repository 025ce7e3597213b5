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

#ifndef DPK_TEXT_IO_HPP
#define DPK_TEXT_IO_HPP

// Line-oriented tokenizing shared by all bespoke text formats.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace dpk::text {

struct Line {
  std::size_t number = 0;  // 1-based line number in the source
  std::string_view raw;    // without comment and trailing whitespace
  std::vector<std::string_view> tokens;
  bool indented = false;
};

/// Splits into non-empty lines with `#` comments removed. Views point into
/// `text`, which must outlive the result.
std::vector<Line> split_lines(std::string_view text);

/// Whitespace tokenization of an arbitrary span of text.
std::vector<std::string_view> split_ws(std::string_view text);

/// Parses a floating-point token. Throws MalformedLine for non-numeric text
/// and NonFiniteValue for nan/inf. `line` is used for the message only.
double to_double(std::string_view token, std::size_t line);
long long to_int(std::string_view token, std::size_t line);

/// Shortest decimal form that round-trips exactly (canonical serialization).
std::string shortest(double value);

/// Six significant digits (report output).
std::string sig6(double value);

[[noreturn]] void malformed(std::size_t line, std::string_view token,
                            std::string_view what);

std::string read_file(const std::string& path);

}  // namespace dpk::text

#endif  // DPK_TEXT_IO_HPP
