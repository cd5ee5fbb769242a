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

#include "ephyspack/types.h"

#include <array>
#include <charconv>
#include <cmath>

namespace ephyspack {
namespace {

constexpr std::array<std::string_view, 11> kDTypeNames = {
    "u8", "i8", "u16", "i16", "u32", "i32", "u64", "i64", "f32", "f64", "utf8"};

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string_view dtype_name(DType dtype) {
  auto idx = static_cast<std::size_t>(dtype) - 1;
  return idx < kDTypeNames.size() ? kDTypeNames[idx] : std::string_view("?");
}

std::optional<DType> parse_dtype(std::string_view name) {
  for (std::size_t i = 0; i < kDTypeNames.size(); ++i) {
    if (kDTypeNames[i] == name) return static_cast<DType>(i + 1);
  }
  return std::nullopt;
}

std::size_t dtype_size(DType dtype) {
  switch (dtype) {
    case DType::kU8:
    case DType::kI8:
      return 1;
    case DType::kU16:
    case DType::kI16:
      return 2;
    case DType::kU32:
    case DType::kI32:
    case DType::kF32:
      return 4;
    case DType::kU64:
    case DType::kI64:
    case DType::kF64:
      return 8;
    case DType::kUtf8:
      return 0;
  }
  return 0;
}

bool is_numeric(DType dtype) { return dtype != DType::kUtf8; }

bool is_valid_dtype(std::uint8_t raw) { return raw >= 1 && raw <= 11; }

DType dtype_of(const ArrayData& data) {
  return static_cast<DType>(data.index() + 1);
}

std::size_t element_count(const ArrayData& data) {
  return std::visit([](const auto& v) { return v.size(); }, data);
}

namespace {
template <std::size_t I>
ArrayData make_indexed(std::size_t index, std::size_t count) {
  if constexpr (I < std::variant_size_v<ArrayData>) {
    if (index == I) {
      return ArrayData(std::in_place_index<I>,
                       std::variant_alternative_t<I, ArrayData>(count));
    }
    return make_indexed<I + 1>(index, count);
  } else {
    return ArrayData(std::in_place_index<9>, std::vector<double>(count));
  }
}
}  // namespace

ArrayData make_array(DType dtype, std::size_t count) {
  return make_indexed<0>(static_cast<std::size_t>(dtype) - 1, count);
}

std::uint64_t product(const Extent& extent) {
  std::uint64_t p = 1;
  for (auto e : extent) p *= e;
  return p;
}

std::string_view attr_type_name(const AttrValue& value) {
  static constexpr std::array<std::string_view, 7> kNames = {
      "utf8", "f64", "i64", "u64", "bool", "f64[]", "utf8[]"};
  return kNames[value.index()];
}

std::string attr_to_string(const AttrValue& value) {
  struct Visitor {
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(double d) const { return format_double(d); }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(std::uint64_t u) const { return std::to_string(u); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(const std::vector<double>& v) const {
      std::string out = "[";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += format_double(v[i]);
      }
      return out + "]";
    }
    std::string operator()(const std::vector<std::string>& v) const {
      std::string out = "[";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += v[i];
      }
      return out + "]";
    }
  };
  return std::visit(Visitor{}, value);
}

bool is_valid_utf8(std::string_view text) {
  const auto* s = reinterpret_cast<const unsigned char*>(text.data());
  std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    unsigned char c = s[i];
    if (c < 0x80) {
      ++i;
      continue;
    }
    std::size_t len;
    std::uint32_t cp;
    if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > n) return false;
    for (std::size_t k = 1; k < len; ++k) {
      if ((s[i + k] & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (s[i + k] & 0x3F);
    }
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
        (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += len;
  }
  return true;
}

}  // namespace ephyspack
