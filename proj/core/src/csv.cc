// Copyright 2026 The ephyspack Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ephyspack/csv.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ephyspack/error.h"

namespace ephyspack {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string where(const std::string& file, std::size_t line, std::size_t col) {
  return file + ":" + std::to_string(line) + ":" + std::to_string(col);
}

std::vector<std::string> split_fields(std::string_view line, const std::string& file,
                                      std::size_t lineno) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        field += ch;
      }
    } else if (ch == '"' && trim(field).empty()) {
      quoted = was_quoted = true;
      field.clear();
    } else if (ch == ',') {
      out.push_back(was_quoted ? field : std::string(trim(field)));
      field.clear();
      was_quoted = false;
    } else {
      field += ch;
    }
  }
  if (quoted) throw Error(Errc::kParseError, where(file, lineno, out.size() + 1) + ": unterminated quote");
  out.push_back(was_quoted ? field : std::string(trim(field)));
  return out;
}

}  // namespace

bool parse_f64(std::string_view field, double& out) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return false;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

CsvTable parse_csv(std::string_view text, bool has_header, std::string file) {
  CsvTable t;
  t.file = std::move(file);
  std::size_t lineno = 0;
  std::size_t width = 0;
  bool need_header = has_header;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++lineno;
    auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto fields = split_fields(line, t.file, lineno);
    if (need_header) {
      t.header = std::move(fields);
      width = t.header.size();
      need_header = false;
      continue;
    }
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      throw Error(Errc::kParseError, where(t.file, lineno, 1) + ": expected " + std::to_string(width) +
                                         " fields, found " + std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(lineno);
  }
  if (need_header) throw Error(Errc::kParseError, t.file + ": header row missing");
  return t;
}

CsvTable read_csv(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIoFailure, "cannot read " + path.string(), path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), has_header, path.string());
}

std::size_t CsvTable::column(std::string_view name_or_index) const {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == name_or_index) return k;
  }
  std::size_t idx = 0;
  auto [ptr, ec] = std::from_chars(name_or_index.data(), name_or_index.data() + name_or_index.size(), idx);
  const std::size_t width = header.empty() ? (rows.empty() ? 0 : rows[0].size()) : header.size();
  if (ec == std::errc() && ptr == name_or_index.data() + name_or_index.size() && idx < width) return idx;
  throw Error(Errc::kManifestError, file + ": no column '" + std::string(name_or_index) + "'");
}

double CsvTable::number(std::size_t row, std::size_t col) const {
  double v = 0;
  if (!parse_f64(rows.at(row).at(col), v)) {
    throw Error(Errc::kParseError, where(file, line_numbers[row], col + 1) + ": '" + rows[row][col] +
                                       "' is not a number");
  }
  return v;
}

const std::string& CsvTable::text(std::size_t row, std::size_t col) const {
  return rows.at(row).at(col);
}

}  // namespace ephyspack
