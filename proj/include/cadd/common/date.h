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

#ifndef CADD_COMMON_DATE_H_
#define CADD_COMMON_DATE_H_

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace cadd {

// Calendar date at day resolution.
class Date {
 public:
  Date() = default;
  Date(int year, unsigned month, unsigned day);
  explicit Date(std::chrono::sys_days days);

  // Accepts "YYYY-MM-DD", optionally followed by a time part
  // ("YYYY-MM-DD HH:MM:SS" or "YYYY-MM-DDTHH:MM:SSZ"); the time is dropped.
  static Date Parse(std::string_view text);
  static std::optional<Date> TryParse(std::string_view text);
  static Date FromUnixSeconds(long long seconds);
  static Date Today();

  std::string ToString() const;
  std::chrono::sys_days days() const { return std::chrono::sys_days(ymd_); }
  long long DaysSinceEpoch() const { return days().time_since_epoch().count(); }

  int year() const { return static_cast<int>(ymd_.year()); }
  unsigned month() const { return static_cast<unsigned>(ymd_.month()); }
  unsigned day() const { return static_cast<unsigned>(ymd_.day()); }

  friend bool operator==(const Date& a, const Date& b) { return a.ymd_ == b.ymd_; }
  friend auto operator<=>(const Date& a, const Date& b) { return a.days() <=> b.days(); }

 private:
  std::chrono::year_month_day ymd_{std::chrono::year{1970}, std::chrono::month{1},
                                   std::chrono::day{1}};
};

}  // namespace cadd

#endif  // CADD_COMMON_DATE_H_
