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

#ifndef EPHYSPACK_CRC32C_H_
#define EPHYSPACK_CRC32C_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace ephyspack {

// CRC-32C (Castagnoli, reflected polynomial 0x82F63B78), initial value and
// final xor 0xFFFFFFFF. extend() continues a previously finished checksum.
std::uint32_t crc32c_extend(std::uint32_t crc, std::span<const std::byte> data);

inline std::uint32_t crc32c(std::span<const std::byte> data) {
  return crc32c_extend(0, data);
}

inline std::uint32_t crc32c(std::string_view text) {
  return crc32c(std::as_bytes(std::span(text.data(), text.size())));
}

}  // namespace ephyspack

#endif  // EPHYSPACK_CRC32C_H_
