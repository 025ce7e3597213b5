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

#ifndef DPK_REPORT_HPP
#define DPK_REPORT_HPP

/// @file report.hpp
/// Text emission shared by every subcommand. Numbers are printed with six
/// significant digits; header keys and column names carry their units.

#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace dpk::report {

enum class Format { Plain, Table };

struct Report {
  std::string title;
  std::vector<std::pair<std::string, std::string>> header;  // insertion order
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::string key, double value);
  void add(std::string key, std::string value);
  void add(std::string key, const char* value) { add(std::move(key), std::string(value)); }
  void add_row(std::initializer_list<double> values);
  void add_row(std::vector<std::string> cells);
};

/// Plain: `# key = value` lines, a `# columns` line and space-separated rows.
/// Table: aligned key/value block, then a ruled, right-aligned table.
std::string emit_report(const Report& report, Format format);

}  // namespace dpk::report

#endif  // DPK_REPORT_HPP
