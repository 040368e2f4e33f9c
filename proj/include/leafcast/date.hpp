/* Copyright 2026 The Leafcast Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef LEAFCAST_DATE_HPP_
#define LEAFCAST_DATE_HPP_

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace leafcast {

// Proleptic Gregorian calendar day, stored as days since 1970-01-01.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::int32_t serial) : serial_(serial) {}

  static Date from_ymd(int year, int month, int day);
  // Strict ISO-8601 `YYYY-MM-DD`. Throws DataError on anything else.
  static Date parse(std::string_view text);

  std::int32_t serial() const { return serial_; }
  int year() const;
  int month() const;
  int day() const;
  // 1-based; Jan 1 is 1, Dec 31 is 365 or 366.
  int day_of_year() const;
  std::string to_string() const;

  Date operator+(int days) const { return Date(serial_ + days); }
  Date operator-(int days) const { return Date(serial_ - days); }
  int operator-(Date other) const { return serial_ - other.serial_; }
  Date& operator++() {
    ++serial_;
    return *this;
  }

  auto operator<=>(const Date&) const = default;

 private:
  std::int32_t serial_ = 0;
};

bool is_leap_year(int year);
int days_in_year(int year);
int days_in_month(int year, int month);

}  // namespace leafcast

#endif  // LEAFCAST_DATE_HPP_
