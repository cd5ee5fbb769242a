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

#ifndef EPHYSPACK_VALIDATE_H_
#define EPHYSPACK_VALIDATE_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "ephyspack/container.h"
#include "ephyspack/rules.h"

namespace ephyspack {

enum class ValidationLevel { kFast, kFull };

struct Finding {
  Severity severity = Severity::kError;
  std::string code;
  std::string path;
  std::string message;
  AttrMap detail;
  friend bool operator==(const Finding&, const Finding&) = default;
};

struct ValidationReport {
  std::vector<Finding> findings;  // sorted by (path, code)
  std::size_t errors = 0;
  std::size_t warnings = 0;
  std::size_t infos = 0;
  std::size_t checked_rules = 0;

  bool has_errors() const { return errors > 0; }
  bool has(std::string_view code) const;
};

struct ValidateOptions {
  ValidationLevel level = ValidationLevel::kFull;
  // Chunk verification workers; 0 picks the hardware concurrency.
  unsigned threads = 0;
};

// Structural problems become findings; only an unreadable file throws
// (IoFailure).
ValidationReport validate_file(const std::filesystem::path& path, const ValidateOptions& options = {});
ValidationReport validate_container(const Container& c, const ValidateOptions& options = {});

// "SEVERITY CODE path — message"
std::string format_finding(const Finding& f);

}  // namespace ephyspack

#endif  // EPHYSPACK_VALIDATE_H_
