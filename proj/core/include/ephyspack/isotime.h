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

#ifndef EPHYSPACK_ISOTIME_H_
#define EPHYSPACK_ISOTIME_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ephyspack {

// Date, local time and zone offset as written in ISO 8601
// ("2024-01-02T03:04:05+01:00", fractional seconds and "Z" accepted).
struct IsoTime {
  int year = 1970;
  int month = 1;
  int day = 1;
  int hour = 0;
  int minute = 0;
  int second = 0;
  std::int64_t nanos = 0;
  int offset_minutes = 0;

  static std::optional<IsoTime> parse(std::string_view text);
  static IsoTime now_utc();

  // Seconds since 1970-01-01T00:00:00Z.
  double unix_seconds() const;
  // Same zone offset, shifted by a (possibly fractional) number of seconds.
  IsoTime plus_seconds(double seconds) const;
  // Canonical form with explicit numeric offset; fractional digits only when
  // non-zero (up to nanoseconds, trailing zeros trimmed).
  std::string to_string() const;
};

// True when the text parses and carries "Z" or a numeric offset.
bool is_iso8601_with_offset(std::string_view text);

}  // namespace ephyspack

#endif  // EPHYSPACK_ISOTIME_H_
