// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "epass/date.hpp"

#include <cstdio>

#include "epass/common.hpp"

namespace epass {

namespace chr = std::chrono;

namespace {

chr::year_month_day ymd_of(int days) {
  return chr::year_month_day{chr::sys_days{chr::days{days}}};
}

int parse_digits(std::string_view text, std::size_t pos, std::size_t n) {
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    char c = text[i];
    if (c < '0' || c > '9') throw InvalidInput("non-digit in date");
    v = v * 10 + (c - '0');
  }
  return v;
}

}  // namespace

Date Date::from_ymd(int year, unsigned month, unsigned day) {
  chr::year_month_day ymd{chr::year{year}, chr::month{month}, chr::day{day}};
  if (!ymd.ok()) throw InvalidInput("invalid calendar date");
  return Date(chr::sys_days{ymd}.time_since_epoch().count());
}

Date Date::parse_iso(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-')
    throw InvalidInput("date must be YYYY-MM-DD");
  return from_ymd(parse_digits(text, 0, 4),
                  static_cast<unsigned>(parse_digits(text, 5, 2)),
                  static_cast<unsigned>(parse_digits(text, 8, 2)));
}

Date Date::parse_yymmdd(std::string_view text, bool birth_window) {
  if (text.size() != 6) throw InvalidInput("MRZ date must have 6 digits");
  int yy = parse_digits(text, 0, 2);
  int year = (!birth_window || yy <= 29) ? 2000 + yy : 1900 + yy;
  return from_ymd(year, static_cast<unsigned>(parse_digits(text, 2, 2)),
                  static_cast<unsigned>(parse_digits(text, 4, 2)));
}

std::string Date::iso() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year(), month(), day());
  return buf;
}

std::string Date::yymmdd() const {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d%02u%02u", ((year() % 100) + 100) % 100,
                month(), day());
  return buf;
}

int Date::year() const { return static_cast<int>(ymd_of(days_).year()); }
unsigned Date::month() const {
  return static_cast<unsigned>(ymd_of(days_).month());
}
unsigned Date::day() const { return static_cast<unsigned>(ymd_of(days_).day()); }

bool Date::is_weekday() const {
  chr::weekday wd{chr::sys_days{chr::days{days_}}};
  return wd != chr::Saturday && wd != chr::Sunday;
}

Date Date::plus_years(int n) const {
  auto ymd = ymd_of(days_);
  chr::year_month_day shifted = ymd + chr::years{n};
  if (!shifted.ok())  // Feb 29 -> Feb 28
    shifted = shifted.year() / shifted.month() / chr::last;
  return Date(chr::sys_days{shifted}.time_since_epoch().count());
}

}  // namespace epass
