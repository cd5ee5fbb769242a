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

#ifndef EPHYSPACK_TOOLS_CLI_H_
#define EPHYSPACK_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace ephyspack::cli {

// Exit codes: 0 ok, 1 validation errors or not found, 2 usage or I/O error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFindings = 1;
inline constexpr int kExitUsage = 2;

struct Streams {
  std::ostream& out;
  std::ostream& err;
  bool color = false;
};

// args excludes the program name.
int run(const std::vector<std::string>& args, Streams streams);

// Styling is on only for a terminal and when EPHYSPACK_NO_COLOR is unset.
bool color_enabled_for_stdout();

}  // namespace ephyspack::cli

#endif  // EPHYSPACK_TOOLS_CLI_H_
