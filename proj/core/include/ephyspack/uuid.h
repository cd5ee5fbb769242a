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

#ifndef EPHYSPACK_UUID_H_
#define EPHYSPACK_UUID_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ephyspack {

struct Uuid {
  std::array<std::uint8_t, 16> bytes{};

  // RFC 4122 random UUID from the system entropy source.
  static Uuid random_v4();
  // Random-layout UUID whose bits come from the caller, version/variant set.
  static Uuid from_bits_v4(std::uint64_t hi, std::uint64_t lo);
  static std::optional<Uuid> parse(std::string_view text);

  bool is_nil() const;
  int version() const { return bytes[6] >> 4; }
  bool is_valid_v4() const;
  std::string to_string() const;

  friend bool operator==(const Uuid&, const Uuid&) = default;
};

}  // namespace ephyspack

#endif  // EPHYSPACK_UUID_H_
