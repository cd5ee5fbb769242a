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

#ifndef EPHYSPACK_CSV_H_
#define EPHYSPACK_CSV_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ephyspack {

// Comma-separated text: '#' lines and blank lines are skipped, fields may be
// double-quoted ("" escapes a quote).
struct CsvTable {
  std::string file;
  std::vector<std::string> header;  // empty without a header row
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based, one per row

  // Column index by header name or decimal position; throws ManifestError.
  std::size_t column(std::string_view name_or_index) const;
  // Field as f64; throws ParseError naming file, line and column.
  double number(std::size_t row, std::size_t col) const;
  const std::string& text(std::size_t row, std::size_t col) const;
};

CsvTable parse_csv(std::string_view text, bool has_header, std::string file = "<memory>");
CsvTable read_csv(const std::filesystem::path& path, bool has_header);

// Locale-independent: '.' decimal point, exponents, inf and nan accepted.
// Returns false unless the whole field is consumed.
bool parse_f64(std::string_view field, double& out);

}  // namespace ephyspack

#endif  // EPHYSPACK_CSV_H_
