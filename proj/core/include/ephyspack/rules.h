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

#ifndef EPHYSPACK_RULES_H_
#define EPHYSPACK_RULES_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ephyspack/error.h"
#include "ephyspack/types.h"

namespace ephyspack {

enum class Severity { kError, kWarning, kInfo };

std::string_view severity_name(Severity severity);

struct RuleInfo {
  std::string_view code;  // letter + three digits
  Severity severity;
  std::string_view description;
  std::string_view clause;  // requirement the rule enforces
  Errc errc;                // error raised by writers
  bool fast;                // evaluated without reading chunk payloads
};

// Stable listing, sorted by code.
std::span<const RuleInfo> rule_catalog();
const RuleInfo* find_rule(std::string_view code);

struct Violation {
  std::string code;
  std::string path;
  std::string message;
  AttrMap detail;
};

// Destination for rule violations. Writers throw the rule's specific error,
// readers throw SchemaViolation, the validator collects.
class Reporter {
 public:
  enum class Mode { kWriter, kReader, kCollect };

  explicit Reporter(Mode mode) : mode_(mode) {}

  void report(std::string_view code, std::string path, std::string message,
              AttrMap detail = {});
  // Reports and then abandons the current entity.
  [[noreturn]] void fatal(std::string_view code, std::string path,
                          std::string message);

  Mode mode() const { return mode_; }
  const std::vector<Violation>& violations() const { return violations_; }
  std::vector<Violation> take() { return std::move(violations_); }

 private:
  Mode mode_;
  std::vector<Violation> violations_;
};

// Thrown by Reporter::fatal in collect mode.
struct EntityAbandoned {};

}  // namespace ephyspack

#endif  // EPHYSPACK_RULES_H_
