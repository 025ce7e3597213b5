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

#include "dpk/report.hpp"

#include <algorithm>

#include "dpk/text_io.hpp"

namespace dpk::report {

void Report::add(std::string key, double value) { header.emplace_back(std::move(key), text::sig6(value)); }

void Report::add(std::string key, std::string value) {
  header.emplace_back(std::move(key), std::move(value));
}

void Report::add_row(std::initializer_list<double> values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(text::sig6(v));
  rows.push_back(std::move(cells));
}

void Report::add_row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }

namespace {

std::string pad_left(const std::string& s, std::size_t w) {
  return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t w) {
  return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
}

std::string plain(const Report& r) {
  std::string out = "# " + r.title + "\n";
  for (const auto& [k, v] : r.header) out += "# " + k + " = " + v + "\n";
  if (!r.columns.empty()) {
    out += "#";
    for (const auto& c : r.columns) out += " " + c;
    out += "\n";
  }
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? " " : "") + row[i];
    out += "\n";
  }
  return out;
}

std::string table(const Report& r) {
  std::string out = r.title + "\n";
  std::size_t kw = 0;
  for (const auto& [k, v] : r.header) kw = std::max(kw, k.size());
  for (const auto& [k, v] : r.header) out += "  " + pad_right(k, kw) + "  " + v + "\n";
  if (r.columns.empty()) return out;

  std::vector<std::size_t> w(r.columns.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = r.columns[i].size();
  for (const auto& row : r.rows)
    for (std::size_t i = 0; i < row.size() && i < w.size(); ++i) w[i] = std::max(w[i], row[i].size());

  std::string rule;
  for (std::size_t i = 0; i < w.size(); ++i) {
    out += (i ? "  " : "") + pad_left(r.columns[i], w[i]);
    rule += (i ? "  " : "") + std::string(w[i], '-');
  }
  out += "\n" + rule + "\n";
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out += (i ? "  " : "") + pad_left(row[i], i < w.size() ? w[i] : 0);
    out += "\n";
  }
  return out;
}

}  // namespace

std::string emit_report(const Report& report, Format format) {
  return format == Format::Plain ? plain(report) : table(report);
}

}  // namespace dpk::report
