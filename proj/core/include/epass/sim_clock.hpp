// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>

#include "epass/date.hpp"

namespace epass {

/// Simulated wall clock shared by the parties of one experiment. Nothing in
/// the lab sleeps; delays are charged to this clock instead.
class SimClock {
 public:
  using Duration = std::chrono::milliseconds;

  explicit SimClock(Date start = Date::from_ymd(2026, 1, 1)) : start_(start) {}

  void advance(Duration d) { elapsed_ += d; }
  Duration elapsed() const { return elapsed_; }

  Date today() const {
    return start_.plus_days(static_cast<int>(
        std::chrono::duration_cast<std::chrono::days>(elapsed_).count()));
  }

  /// Seconds since 1970-01-01T00:00Z.
  std::int64_t unix_seconds() const {
    return std::int64_t{start_.days_since_epoch()} * 86400 +
           std::chrono::duration_cast<std::chrono::seconds>(elapsed_).count();
  }

 private:
  Date start_;
  Duration elapsed_{0};
};

}  // namespace epass
