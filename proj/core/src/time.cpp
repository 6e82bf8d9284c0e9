// Copyright 2026 The crisistl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "crisistl/time.hpp"

#include <charconv>
#include <cstdio>

#include "crisistl/error.hpp"

namespace crisistl {
namespace {

int read_digits(std::string_view text, std::size_t pos, std::size_t count) {
  if (pos + count > text.size()) {
    throw DataError("truncated timestamp '" + std::string(text) + "'");
  }
  int value = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    char c = text[i];
    if (c < '0' || c > '9') {
      throw DataError("bad digit in timestamp '" + std::string(text) + "'");
    }
    value = value * 10 + (c - '0');
  }
  return value;
}

void expect(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c) {
    throw DataError("malformed timestamp '" + std::string(text) + "'");
  }
}

}  // namespace

Timestamp parse_rfc3339(std::string_view text) {
  using namespace std::chrono;
  int y = read_digits(text, 0, 4);
  expect(text, 4, '-');
  int mo = read_digits(text, 5, 2);
  expect(text, 7, '-');
  int d = read_digits(text, 8, 2);
  if (text.size() <= 10 || (text[10] != 'T' && text[10] != 't' && text[10] != ' ')) {
    throw DataError("malformed timestamp '" + std::string(text) + "'");
  }
  int h = read_digits(text, 11, 2);
  expect(text, 13, ':');
  int mi = read_digits(text, 14, 2);
  expect(text, 16, ':');
  int s = read_digits(text, 17, 2);
  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
  }
  int offset_minutes = 0;
  if (pos < text.size() && (text[pos] == 'Z' || text[pos] == 'z')) {
    ++pos;
  } else if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    int sign = text[pos] == '+' ? 1 : -1;
    int oh = read_digits(text, pos + 1, 2);
    expect(text, pos + 3, ':');
    int om = read_digits(text, pos + 4, 2);
    offset_minutes = sign * (oh * 60 + om);
    pos += 6;
  } else {
    throw DataError("timestamp '" + std::string(text) + "' lacks a UTC offset");
  }
  if (pos != text.size()) {
    throw DataError("trailing characters in timestamp '" + std::string(text) + "'");
  }
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                     day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) {
    throw DataError("out-of-range timestamp '" + std::string(text) + "'");
  }
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} -
         minutes{offset_minutes};
}

std::string format_rfc3339(Timestamp t) {
  using namespace std::chrono;
  auto day_point = floor<days>(t);
  year_month_day ymd{day_point};
  hh_mm_ss hms{t - day_point};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()),
                static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

Duration parse_duration(std::string_view text) {
  if (text.empty()) throw DataError("empty duration");
  long long total = 0;
  std::size_t pos = 0;
  bool any = false;
  while (pos < text.size()) {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), value);
    if (ec != std::errc{} || value < 0) {
      throw DataError("malformed duration '" + std::string(text) + "'");
    }
    pos = static_cast<std::size_t>(ptr - text.data());
    long long unit = 1;
    if (pos < text.size()) {
      switch (text[pos]) {
        case 'd': unit = 86400; break;
        case 'h': unit = 3600; break;
        case 'm': unit = 60; break;
        case 's': unit = 1; break;
        default:
          throw DataError("unknown duration unit in '" + std::string(text) + "'");
      }
      ++pos;
    } else if (any) {
      throw DataError("duration component lacks a unit in '" + std::string(text) + "'");
    }
    total += value * unit;
    any = true;
  }
  return Duration{total};
}

std::string format_duration(Duration d) {
  long long s = d.count();
  if (s != 0 && s % 86400 == 0) return std::to_string(s / 86400) + "d";
  if (s != 0 && s % 3600 == 0) return std::to_string(s / 3600) + "h";
  if (s != 0 && s % 60 == 0) return std::to_string(s / 60) + "m";
  return std::to_string(s) + "s";
}

}  // namespace crisistl
