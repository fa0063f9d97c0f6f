// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace epass {

/// Calendar date (proleptic Gregorian), stored as days since 1970-01-01.
class Date {
 public:
  constexpr Date() = default;

  static Date from_ymd(int year, unsigned month, unsigned day);
  static constexpr Date from_days(int days) { return Date(days); }
  /// "YYYY-MM-DD"; throws InvalidInput.
  static Date parse_iso(std::string_view text);
  /// Six-digit MRZ date. Years 00-29 map to 2000-2029 when
  /// `birth_window` is set, else to 1930-1999; expiry dates are always 20YY.
  static Date parse_yymmdd(std::string_view text, bool birth_window);

  std::string iso() const;
  std::string yymmdd() const;

  int year() const;
  unsigned month() const;
  unsigned day() const;
  /// Monday..Friday.
  bool is_weekday() const;

  constexpr int days_since_epoch() const { return days_; }
  constexpr Date plus_days(int n) const { return Date(days_ + n); }
  Date plus_years(int n) const;

  constexpr int operator-(Date other) const { return days_ - other.days_; }
  constexpr auto operator<=>(const Date&) const = default;

 private:
  constexpr explicit Date(int days) : days_(days) {}
  int days_ = 0;
};

/// Half-open run of consecutive days [first, first + days).
struct DateRange {
  Date first;
  int days = 0;

  Date last() const { return first.plus_days(days - 1); }
  bool contains(Date d) const { return d >= first && d - first < days; }
};

}  // namespace epass
