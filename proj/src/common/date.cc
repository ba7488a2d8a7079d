// Copyright 2026 The CADD Authors.
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

#include "cadd/common/date.h"

#include <charconv>
#include <cstdio>

#include "cadd/common/error.h"

namespace cadd {

namespace {

bool ParseInt(std::string_view s, int* out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day)
    : ymd_(std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}) {
  if (!ymd_.ok()) {
    throw ValidationError("invalid calendar date: " + std::to_string(year) + "-" +
                          std::to_string(month) + "-" + std::to_string(day));
  }
}

Date::Date(std::chrono::sys_days days) : ymd_(days) {}

std::optional<Date> Date::TryParse(std::string_view text) {
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  if (text.size() > 10 && text[10] != ' ' && text[10] != 'T') return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!ParseInt(text.substr(0, 4), &y) || !ParseInt(text.substr(5, 2), &m) ||
      !ParseInt(text.substr(8, 2), &d)) {
    return std::nullopt;
  }
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                  std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return Date(std::chrono::sys_days(ymd));
}

Date Date::Parse(std::string_view text) {
  auto date = TryParse(text);
  if (!date) throw ParseError("malformed date: '" + std::string(text) + "'");
  return *date;
}

Date Date::FromUnixSeconds(long long seconds) {
  long long days = seconds / 86400;
  if (seconds < 0 && seconds % 86400 != 0) --days;
  return Date(std::chrono::sys_days(std::chrono::days(days)));
}

Date Date::Today() {
  return Date(std::chrono::floor<std::chrono::days>(std::chrono::system_clock::now()));
}

std::string Date::ToString() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year(), month(), day());
  return buf;
}

}  // namespace cadd
