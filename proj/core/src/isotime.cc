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

#include "ephyspack/isotime.h"

#include <chrono>
#include <cmath>
#include <cstdio>

namespace ephyspack {
namespace {

// Days since 1970-01-01 for a proleptic Gregorian date (H. Hinnant).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
  y = static_cast<int>(yy + (m <= 2));
}

int days_in_month(int y, int m) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  return m == 2 && leap ? 29 : kDays[m - 1];
}

bool digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
  if (pos + n > s.size()) return false;
  int v = 0;
  for (std::size_t i = 0; i < n; ++i) {
    char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  return true;
}

constexpr std::int64_t kNanosPerSecond = 1'000'000'000;

}  // namespace

std::optional<IsoTime> IsoTime::parse(std::string_view s) {
  IsoTime t;
  if (!digits(s, 0, 4, t.year) || s.size() < 19 || s[4] != '-' ||
      !digits(s, 5, 2, t.month) || s[7] != '-' || !digits(s, 8, 2, t.day) ||
      (s[10] != 'T' && s[10] != 't') || !digits(s, 11, 2, t.hour) ||
      s[13] != ':' || !digits(s, 14, 2, t.minute) || s[16] != ':' ||
      !digits(s, 17, 2, t.second)) {
    return std::nullopt;
  }
  if (t.month < 1 || t.month > 12 || t.day < 1 ||
      t.day > days_in_month(t.year, t.month) || t.hour > 23 || t.minute > 59 ||
      t.second > 59) {
    return std::nullopt;
  }
  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    std::size_t start = pos;
    std::int64_t frac = 0;
    int ndigits = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      if (ndigits < 9) {
        frac = frac * 10 + (s[pos] - '0');
        ++ndigits;
      }
      ++pos;
    }
    if (pos == start) return std::nullopt;
    while (ndigits < 9) {
      frac *= 10;
      ++ndigits;
    }
    t.nanos = frac;
  }
  if (pos >= s.size()) return std::nullopt;  // zone is mandatory
  if (s[pos] == 'Z' || s[pos] == 'z') {
    t.offset_minutes = 0;
    ++pos;
  } else if (s[pos] == '+' || s[pos] == '-') {
    int sign = s[pos] == '-' ? -1 : 1;
    int oh = 0;
    int om = 0;
    if (!digits(s, pos + 1, 2, oh) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
        !digits(s, pos + 4, 2, om) || oh > 23 || om > 59) {
      return std::nullopt;
    }
    t.offset_minutes = sign * (oh * 60 + om);
    pos += 6;
  } else {
    return std::nullopt;
  }
  if (pos != s.size()) return std::nullopt;
  return t;
}

IsoTime IsoTime::now_utc() {
  auto now = std::chrono::system_clock::now();
  auto secs = std::chrono::floor<std::chrono::seconds>(now);
  IsoTime t;
  t.offset_minutes = 0;
  return t.plus_seconds(static_cast<double>(secs.time_since_epoch().count()));
}

double IsoTime::unix_seconds() const {
  std::int64_t days = days_from_civil(year, static_cast<unsigned>(month),
                                      static_cast<unsigned>(day));
  std::int64_t secs = days * 86400 + hour * 3600 + minute * 60 + second -
                      std::int64_t{offset_minutes} * 60;
  return static_cast<double>(secs) + static_cast<double>(nanos) * 1e-9;
}

IsoTime IsoTime::plus_seconds(double seconds) const {
  std::int64_t local = days_from_civil(year, static_cast<unsigned>(month),
                                       static_cast<unsigned>(day)) * 86400 +
                       hour * 3600 + minute * 60 + second;
  double whole = std::floor(seconds);
  std::int64_t add_secs = static_cast<std::int64_t>(whole);
  std::int64_t add_nanos =
      static_cast<std::int64_t>(std::llround((seconds - whole) * 1e9));
  std::int64_t total_nanos = nanos + add_nanos;
  local += add_secs + total_nanos / kNanosPerSecond;
  total_nanos %= kNanosPerSecond;
  std::int64_t days = local >= 0 ? local / 86400 : (local - 86399) / 86400;
  std::int64_t rem = local - days * 86400;
  IsoTime out;
  civil_from_days(days, out.year, out.month, out.day);
  out.hour = static_cast<int>(rem / 3600);
  out.minute = static_cast<int>((rem % 3600) / 60);
  out.second = static_cast<int>(rem % 60);
  out.nanos = total_nanos;
  out.offset_minutes = offset_minutes;
  return out;
}

std::string IsoTime::to_string() const {
  char buf[64];
  int n = std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d", year,
                        month, day, hour, minute, second);
  std::string out(buf, static_cast<std::size_t>(n));
  if (nanos != 0) {
    char frac[16];
    std::snprintf(frac, sizeof(frac), "%09lld", static_cast<long long>(nanos));
    std::string f(frac);
    while (!f.empty() && f.back() == '0') f.pop_back();
    out += "." + f;
  }
  int off = offset_minutes;
  char sign = off < 0 ? '-' : '+';
  if (off < 0) off = -off;
  std::snprintf(buf, sizeof(buf), "%c%02d:%02d", sign, off / 60, off % 60);
  return out + buf;
}

bool is_iso8601_with_offset(std::string_view text) {
  return IsoTime::parse(text).has_value();
}

}  // namespace ephyspack
