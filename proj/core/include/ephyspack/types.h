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

#ifndef EPHYSPACK_TYPES_H_
#define EPHYSPACK_TYPES_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ephyspack {

using ObjectId = std::uint64_t;
inline constexpr ObjectId kRootId = 0;

// Per-dimension extents, offsets and counts.
using Extent = std::vector<std::uint64_t>;

inline constexpr std::size_t kMaxRank = 8;

enum class DType : std::uint8_t {
  kU8 = 1,
  kI8 = 2,
  kU16 = 3,
  kI16 = 4,
  kU32 = 5,
  kI32 = 6,
  kU64 = 7,
  kI64 = 8,
  kF32 = 9,
  kF64 = 10,
  kUtf8 = 11,  // variable-length UTF-8 strings, rank 1 only
};

std::string_view dtype_name(DType dtype);
std::optional<DType> parse_dtype(std::string_view name);
// Element size in bytes; 0 for kUtf8.
std::size_t dtype_size(DType dtype);
bool is_numeric(DType dtype);
bool is_valid_dtype(std::uint8_t raw);

// A flat, row-major element sequence of one dtype. The alternative index
// matches DType minus one.
using ArrayData =
    std::variant<std::vector<std::uint8_t>, std::vector<std::int8_t>,
                 std::vector<std::uint16_t>, std::vector<std::int16_t>,
                 std::vector<std::uint32_t>, std::vector<std::int32_t>,
                 std::vector<std::uint64_t>, std::vector<std::int64_t>,
                 std::vector<float>, std::vector<double>,
                 std::vector<std::string>>;

DType dtype_of(const ArrayData& data);
std::size_t element_count(const ArrayData& data);
ArrayData make_array(DType dtype, std::size_t count = 0);

template <typename T>
struct DTypeOf;
template <> struct DTypeOf<std::uint8_t> { static constexpr DType value = DType::kU8; };
template <> struct DTypeOf<std::int8_t> { static constexpr DType value = DType::kI8; };
template <> struct DTypeOf<std::uint16_t> { static constexpr DType value = DType::kU16; };
template <> struct DTypeOf<std::int16_t> { static constexpr DType value = DType::kI16; };
template <> struct DTypeOf<std::uint32_t> { static constexpr DType value = DType::kU32; };
template <> struct DTypeOf<std::int32_t> { static constexpr DType value = DType::kI32; };
template <> struct DTypeOf<std::uint64_t> { static constexpr DType value = DType::kU64; };
template <> struct DTypeOf<std::int64_t> { static constexpr DType value = DType::kI64; };
template <> struct DTypeOf<float> { static constexpr DType value = DType::kF32; };
template <> struct DTypeOf<double> { static constexpr DType value = DType::kF64; };
template <> struct DTypeOf<std::string> { static constexpr DType value = DType::kUtf8; };

std::uint64_t product(const Extent& extent);

// Small typed value attached to any object.
using AttrValue = std::variant<std::string, double, std::int64_t,
                               std::uint64_t, bool, std::vector<double>,
                               std::vector<std::string>>;
using AttrMap = std::map<std::string, AttrValue>;

inline constexpr std::size_t kMaxAttrSequence = 64;
inline constexpr std::size_t kAttrBudgetBytes = 64 * 1024;

std::string_view attr_type_name(const AttrValue& value);
// Human-readable rendering used by text output and provenance search.
std::string attr_to_string(const AttrValue& value);

// UTF-8 well-formedness (no overlongs, no surrogates).
bool is_valid_utf8(std::string_view text);

}  // namespace ephyspack

#endif  // EPHYSPACK_TYPES_H_
