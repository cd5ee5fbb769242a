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

#include "ephyspack/uuid.h"

#include <random>

namespace ephyspack {

Uuid Uuid::random_v4() {
  std::random_device rd;
  auto word = [&rd] {
    return (std::uint64_t{rd()} << 32) | std::uint64_t{rd()};
  };
  std::uint64_t hi = word();
  std::uint64_t lo = word();
  return from_bits_v4(hi, lo);
}

Uuid Uuid::from_bits_v4(std::uint64_t hi, std::uint64_t lo) {
  Uuid u;
  for (int i = 0; i < 8; ++i) {
    u.bytes[i] = static_cast<std::uint8_t>(hi >> (56 - 8 * i));
    u.bytes[8 + i] = static_cast<std::uint8_t>(lo >> (56 - 8 * i));
  }
  u.bytes[6] = static_cast<std::uint8_t>((u.bytes[6] & 0x0F) | 0x40);
  u.bytes[8] = static_cast<std::uint8_t>((u.bytes[8] & 0x3F) | 0x80);
  return u;
}

bool Uuid::is_nil() const {
  for (auto b : bytes) {
    if (b != 0) return false;
  }
  return true;
}

bool Uuid::is_valid_v4() const {
  return !is_nil() && version() == 4 && (bytes[8] & 0xC0) == 0x80;
}

std::string Uuid::to_string() const {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(36);
  for (int i = 0; i < 16; ++i) {
    if (i == 4 || i == 6 || i == 8 || i == 10) out.push_back('-');
    out.push_back(kHex[bytes[i] >> 4]);
    out.push_back(kHex[bytes[i] & 0x0F]);
  }
  return out;
}

std::optional<Uuid> Uuid::parse(std::string_view text) {
  if (text.size() != 36) return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  Uuid u;
  std::size_t pos = 0;
  for (int i = 0; i < 16; ++i) {
    if (pos == 8 || pos == 13 || pos == 18 || pos == 23) {
      if (text[pos] != '-') return std::nullopt;
      ++pos;
    }
    int h = nibble(text[pos]);
    int l = nibble(text[pos + 1]);
    if (h < 0 || l < 0) return std::nullopt;
    u.bytes[i] = static_cast<std::uint8_t>(h << 4 | l);
    pos += 2;
  }
  return u;
}

}  // namespace ephyspack
