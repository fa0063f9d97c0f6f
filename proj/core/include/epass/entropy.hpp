// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "epass/date.hpp"

namespace epass::mrz {

enum class NumberScheme { kUniformAlphanumeric, kSequentialNumeric };

/// Sequentially issued numbers are rendered as prefix + zero-padded decimal
/// occupying the remaining characters of the nine-character field.
struct SequentialNumbering {
  std::uint64_t max_population = 0;
  std::uint64_t first_number = 0;
  std::string prefix;

  int digits() const { return 9 - static_cast<int>(prefix.size()); }
  std::string render(std::uint64_t n) const;
  /// Inverse of render(); nullopt when `number` is not in this format.
  std::optional<std::uint64_t> parse(std::string_view number) const;
};

struct KnownPair {
  std::string document_number;
  Date expiry_date;
};

struct IssuancePolicy {
  int validity_years = 5;
  bool working_days_only = true;
  NumberScheme number_scheme = NumberScheme::kUniformAlphanumeric;
  SequentialNumbering sequential;
  std::vector<KnownPair> known_pairs;  // sorted by document_number
};

/// What the attacker knows. The optional anchors only matter when a
/// concrete candidate space is enumerated; the entropy model needs sizes.
struct AttackerAssumptions {
  std::optional<int> age_known_within_years;
  Date as_of = Date::from_ymd(2026, 1, 1);
  std::optional<Date> birth_window_start;
  std::optional<Date> known_birth_date;
  std::optional<DateRange> expiry_window;
  /// [first, first + count) restriction on sequential numbers.
  std::optional<std::pair<std::uint64_t, std::uint64_t>> number_window;
};

/// Bits of Shannon entropy per field under uniform supports.
struct EntropyReport {
  double birth_bits = 0;
  double expiry_bits = 0;
  double number_bits = 0;
  double reduction_bits = 0;
  double total_bits = 0;

  double effective_number_bits() const { return number_bits - reduction_bits; }
};

/// Throws InvalidInput naming the violated field.
void validate(const IssuancePolicy& policy);

/// Shannon entropy in bits of a discrete distribution.
double shannon_bits(std::span<const double> probabilities);
/// Shannon entropy of a uniform support of `n` outcomes, i.e. log2(n).
/// Throws InvalidInput when n < 1.
double uniform_bits(double n);

EntropyReport field_entropy(const IssuancePolicy& policy,
                            const AttackerAssumptions& assumptions);

/// log2(k + 1) for k known (number, expiry) pairs under sequential numbering.
double sequential_reduction(const IssuancePolicy& policy);

}  // namespace epass::mrz
