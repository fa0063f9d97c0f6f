// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "epass/entropy.hpp"
#include "epass/mrz.hpp"

namespace epass::mrz {

inline constexpr double kDefaultSpaceCapBits = 34.0;

/// Enumerable set of MrzInfo guesses. The space is a union of blocks, one per
/// interval between known (number, expiry) pairs; inside a block candidates
/// are ordered expiry-major, then number, then birth date.
///
/// Copies and partitions share an immutable layout, so sub-spaces can be
/// handed to independent workers.
class CandidateSpace {
 public:
  struct Block {
    std::vector<Date> expiries;
    std::uint64_t number_first = 0;
    std::uint64_t number_count = 0;
  };

  struct Layout {
    std::vector<Date> births;
    std::vector<Block> blocks;
    std::vector<std::uint64_t> block_starts;  // prefix sums, size blocks+1
    NumberScheme scheme = NumberScheme::kUniformAlphanumeric;
    SequentialNumbering numbering;
  };

  explicit CandidateSpace(std::shared_ptr<const Layout> layout);

  std::uint64_t count() const { return end_ - begin_; }
  /// `i`-th candidate of this (sub)space, 0 <= i < count().
  MrzInfo at(std::uint64_t i) const;
  /// The padded document number a block-local number index renders to.
  std::string render_number(std::uint64_t n) const;

  /// `parts` disjoint contiguous sub-spaces whose counts sum to count().
  std::vector<CandidateSpace> partition(std::size_t parts) const;

  std::uint64_t begin_index() const { return begin_; }

 private:
  CandidateSpace(std::shared_ptr<const Layout> layout, std::uint64_t begin,
                 std::uint64_t end);

  std::shared_ptr<const Layout> layout_;
  std::uint64_t begin_ = 0;
  std::uint64_t end_ = 0;
};

/// Exact number of candidates for the modeled supports, computed by summing
/// over intervals and dates rather than enumerating guesses. Never capped.
long double candidate_count(const IssuancePolicy& policy,
                            const AttackerAssumptions& assumptions);

/// Builds the space; throws SpaceTooLarge when log2(count) > cap_bits.
CandidateSpace candidate_space(const IssuancePolicy& policy,
                               const AttackerAssumptions& assumptions,
                               double cap_bits = kDefaultSpaceCapBits);

}  // namespace epass::mrz
