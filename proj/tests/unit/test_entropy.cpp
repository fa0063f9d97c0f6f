// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "epass/candidate_space.hpp"
#include "epass/common.hpp"
#include "epass/entropy.hpp"

namespace epass::mrz {
namespace {

constexpr double kPublished = 0.01;

IssuancePolicy default_policy() { return {}; }

IssuancePolicy sequential_policy(std::uint64_t population = 20'000'000) {
  IssuancePolicy p;
  p.number_scheme = NumberScheme::kSequentialNumeric;
  p.sequential = {population, 0, ""};
  return p;
}

std::vector<KnownPair> spread_pairs(const IssuancePolicy& p, Date as_of, std::size_t k) {
  std::vector<KnownPair> out;
  for (std::size_t i = 1; i <= k; ++i) {
    auto n = p.sequential.max_population * i / (k + 1);
    out.push_back({p.sequential.render(n),
                   as_of.plus_days(static_cast<int>(1826 * i / (k + 1)))});
  }
  return out;
}

TEST(Entropy, UnconstrainedPublishedFigures) {
  auto r = field_entropy(default_policy(), {});
  EXPECT_NEAR(r.birth_bits, 15.16, kPublished);
  EXPECT_NEAR(r.expiry_bits, 10.34, kPublished);
  EXPECT_NEAR(r.number_bits, 46.53, kPublished);
  EXPECT_NEAR(r.total_bits, 72.03, kPublished);
}

TEST(Entropy, ClosedFormsToFullPrecision) {
  auto r = field_entropy(default_policy(), {});
  EXPECT_NEAR(r.birth_bits, std::log2(100 * 365.25), 1e-12);
  EXPECT_NEAR(r.expiry_bits, std::log2(5 * 365.25 * 5.0 / 7.0), 1e-12);
  EXPECT_NEAR(r.number_bits, 9 * std::log2(36.0), 1e-12);
}

TEST(Entropy, AgeKnownWithinFiveYears) {
  AttackerAssumptions a;
  a.age_known_within_years = 5;
  EXPECT_NEAR(field_entropy(default_policy(), a).birth_bits, 10.83, kPublished);
}

TEST(Entropy, SequentialNumbering) {
  EXPECT_NEAR(field_entropy(sequential_policy(), {}).number_bits, 24.25, kPublished);
}

TEST(Entropy, SequentialReduction) {
  auto p = sequential_policy();
  EXPECT_EQ(sequential_reduction(p), 0.0);
  p.known_pairs = spread_pairs(p, Date::from_ymd(2026, 1, 1), 1);
  EXPECT_DOUBLE_EQ(sequential_reduction(p), 1.0);
  p.known_pairs = spread_pairs(p, Date::from_ymd(2026, 1, 1), 15);
  EXPECT_DOUBLE_EQ(sequential_reduction(p), 4.0);
  EXPECT_NEAR(field_entropy(p, {}).effective_number_bits(), 20.25, kPublished);
}

TEST(Entropy, ReductionOnlyAppliesToSequentialSchemes) {
  auto p = default_policy();
  EXPECT_EQ(sequential_reduction(p), 0.0);
}

TEST(Entropy, DutchScenarioMatchesComponentSum) {
  auto p = sequential_policy();
  p.known_pairs = spread_pairs(p, Date::from_ymd(2026, 1, 1), 15);
  AttackerAssumptions a;
  a.age_known_within_years = 5;
  auto r = field_entropy(p, a);
  double oracle = std::log2(5 * 365.25) + std::log2(5 * 365.25 * 5.0 / 7.0) +
                  std::log2(20e6) - std::log2(16.0);
  EXPECT_NEAR(r.total_bits, oracle, 1e-9);
  EXPECT_NEAR(r.total_bits, 41.4374, 1e-4);  // frozen from the oracle above
}

TEST(Entropy, UniformSupportIsExactlyLog2) {
  for (double n : {1.0, 2.0, 3.0, 1000.0, 36.0 * 36 * 36}) {
    std::vector<double> probs(static_cast<std::size_t>(n), 1.0 / n);
    EXPECT_NEAR(shannon_bits(probs), std::log2(n), 1e-9);
    EXPECT_NEAR(uniform_bits(n), std::log2(n), 1e-9);
  }
}

TEST(Entropy, ShannonOfSkewedDistribution) {
  std::vector<double> probs{0.5, 0.25, 0.25};
  EXPECT_NEAR(shannon_bits(probs), 1.5, 1e-12);
  std::vector<double> bad{-0.1, 1.1};
  EXPECT_THROW(shannon_bits(bad), InvalidInput);
}

TEST(Entropy, TotalDecreasesAsAssumptionsAccumulate) {
  auto p = sequential_policy();
  AttackerAssumptions a;
  double previous = field_entropy(default_policy(), a).total_bits;
  double next = field_entropy(p, a).total_bits;
  EXPECT_LT(next, previous);
  previous = next;
  for (int years : {50, 20, 10, 5, 1}) {
    a.age_known_within_years = years;
    next = field_entropy(p, a).total_bits;
    EXPECT_LT(next, previous) << years;
    previous = next;
  }
  for (std::size_t k : {1, 3, 7, 15, 31}) {
    p.known_pairs = spread_pairs(p, a.as_of, k);
    next = field_entropy(p, a).total_bits;
    EXPECT_LT(next, previous) << k;
    previous = next;
  }
}

TEST(Entropy, RejectsUnsortedKnownPairs) {
  auto p = sequential_policy();
  p.known_pairs = spread_pairs(p, Date::from_ymd(2026, 1, 1), 3);
  std::swap(p.known_pairs[0], p.known_pairs[2]);
  EXPECT_THROW(field_entropy(p, {}), InvalidInput);
}

TEST(CandidateSpace, SingleFreeNumericField) {
  IssuancePolicy p = sequential_policy(1'000'000);
  p.working_days_only = false;
  AttackerAssumptions a;
  a.known_birth_date = Date::from_ymd(1980, 1, 2);
  a.expiry_window = DateRange{Date::from_ymd(2029, 6, 15), 1};
  auto space = candidate_space(p, a);
  EXPECT_EQ(space.count(), 1'000'000u);
  EXPECT_EQ(space.at(0).document_number(), "000000000");
  EXPECT_EQ(space.at(999'999).document_number(), "000999999");
}

TEST(CandidateSpace, PartitionIsDisjointAndComplete) {
  IssuancePolicy p = sequential_policy(1000);
  p.working_days_only = false;
  AttackerAssumptions a;
  a.known_birth_date = Date::from_ymd(1980, 1, 2);
  a.expiry_window = DateRange{Date::from_ymd(2029, 6, 1), 7};
  auto space = candidate_space(p, a);
  for (std::size_t parts : {1u, 3u, 4u, 8u}) {
    auto pieces = space.partition(parts);
    ASSERT_EQ(pieces.size(), parts);
    std::uint64_t total = 0;
    std::set<std::string> seen;
    for (const auto& piece : pieces) {
      total += piece.count();
      for (std::uint64_t i = 0; i < piece.count(); ++i)
        ASSERT_TRUE(seen.insert(piece.at(i).value()).second);
    }
    EXPECT_EQ(total, space.count());
    EXPECT_EQ(seen.size(), space.count());
  }
}

TEST(CandidateSpace, DutchScenarioCountTracksEntropy) {
  auto p = sequential_policy();
  AttackerAssumptions a;
  a.age_known_within_years = 5;
  a.birth_window_start = Date::from_ymd(1980, 1, 1);
  p.known_pairs = spread_pairs(p, a.as_of, 15);
  long double count = candidate_count(p, a);
  double bits = static_cast<double>(std::log2(count));
  EXPECT_NEAR(bits, field_entropy(p, a).total_bits, 0.5);
}

TEST(CandidateSpace, UniformIndependentSupportsMatchEntropy) {
  IssuancePolicy p = sequential_policy(4096);
  p.working_days_only = false;
  AttackerAssumptions a;
  a.age_known_within_years = 2;
  a.birth_window_start = Date::from_ymd(1990, 1, 1);
  a.expiry_window = DateRange{Date::from_ymd(2028, 1, 1), 64};
  long double count = candidate_count(p, a);
  double expected = std::log2(2 * 365.25) + std::log2(64.0) + std::log2(4096.0);
  EXPECT_NEAR(static_cast<double>(std::log2(count)), expected, 0.01);
}

TEST(CandidateSpace, RefusesSpacesAboveTheCap) {
  IssuancePolicy p = default_policy();
  try {
    candidate_space(p, {});
    FAIL() << "a 72-bit space was accepted";
  } catch (const SpaceTooLarge& e) {
    EXPECT_GT(e.size_bits(), 70.0);
    EXPECT_EQ(e.cap_bits(), kDefaultSpaceCapBits);
  }
}

TEST(CandidateSpace, AgeWindowNeedsAnAnchor) {
  AttackerAssumptions a;
  a.age_known_within_years = 5;
  EXPECT_THROW(candidate_count(sequential_policy(), a), InvalidInput);
}

}  // namespace
}  // namespace epass::mrz
