// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "epass/entropy.hpp"

#include <algorithm>
#include <cmath>

#include "epass/common.hpp"
#include "epass/mrz.hpp"

namespace epass::mrz {

namespace {

constexpr double kDaysPerYear = 365.25;
constexpr double kWorkingDayRatio = 5.0 / 7.0;
constexpr double kAlphabet = 26 + 10;
constexpr int kCenturyYears = 100;

double field_bits(double support, const char* field) {
  if (!(support >= 1.0))
    throw InvalidInput(std::string(field) + ": empty support");
  return std::log2(support);
}

}  // namespace

std::string SequentialNumbering::render(std::uint64_t n) const {
  std::string digits_text = std::to_string(n);
  if (static_cast<int>(digits_text.size()) > digits())
    throw InvalidInput("sequential number does not fit the document field");
  return prefix + std::string(digits() - digits_text.size(), '0') +
         digits_text;
}

std::optional<std::uint64_t> SequentialNumbering::parse(
    std::string_view number) const {
  if (number.size() != prefix.size() + static_cast<std::size_t>(digits()) ||
      number.substr(0, prefix.size()) != prefix)
    return std::nullopt;
  std::uint64_t v = 0;
  for (char c : number.substr(prefix.size())) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

void validate(const IssuancePolicy& policy) {
  if (policy.validity_years <= 0)
    throw InvalidInput("validity_years: must be positive");
  if (!std::is_sorted(policy.known_pairs.begin(), policy.known_pairs.end(),
                      [](const KnownPair& a, const KnownPair& b) {
                        return a.document_number < b.document_number;
                      }))
    throw InvalidInput("known_pairs: must be sorted by document_number");
  if (policy.number_scheme != NumberScheme::kSequentialNumeric) return;

  const auto& seq = policy.sequential;
  if (seq.prefix.size() >= kDocumentNumberLength)
    throw InvalidInput("sequential.prefix: leaves no room for digits");
  for (char c : seq.prefix)
    if (!((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')))
      throw InvalidInput("sequential.prefix: characters must be A-Z or 0-9");
  for (const auto& pair : policy.known_pairs)
    if (!seq.parse(pair.document_number))
      throw InvalidInput("known_pairs: '" + pair.document_number +
                         "' is not a sequential numeric document number");
}

double shannon_bits(std::span<const double> probabilities) {
  double h = 0;
  for (double p : probabilities) {
    if (p < 0) throw InvalidInput("shannon_bits: negative probability");
    if (p > 0) h -= p * std::log2(p);
  }
  return h;
}

double uniform_bits(double n) { return field_bits(n, "support"); }

double sequential_reduction(const IssuancePolicy& policy) {
  if (policy.number_scheme != NumberScheme::kSequentialNumeric) return 0.0;
  return std::log2(static_cast<double>(policy.known_pairs.size()) + 1.0);
}

EntropyReport field_entropy(const IssuancePolicy& policy,
                            const AttackerAssumptions& assumptions) {
  validate(policy);
  EntropyReport r;

  if (assumptions.known_birth_date) {
    r.birth_bits = 0;
  } else {
    double years = assumptions.age_known_within_years.value_or(kCenturyYears);
    r.birth_bits = field_bits(years * kDaysPerYear, "birth_date");
  }

  double expiry_days = assumptions.expiry_window
                           ? assumptions.expiry_window->days
                           : policy.validity_years * kDaysPerYear;
  if (policy.working_days_only) expiry_days *= kWorkingDayRatio;
  r.expiry_bits = field_bits(expiry_days, "expiry_date");

  if (policy.number_scheme == NumberScheme::kSequentialNumeric) {
    double population =
        assumptions.number_window
            ? static_cast<double>(assumptions.number_window->second)
            : static_cast<double>(policy.sequential.max_population);
    r.number_bits = field_bits(population, "document_number");
  } else {
    r.number_bits = kDocumentNumberLength * std::log2(kAlphabet);
  }

  r.reduction_bits = sequential_reduction(policy);
  r.total_bits = r.birth_bits + r.expiry_bits + r.number_bits - r.reduction_bits;
  return r;
}

}  // namespace epass::mrz
