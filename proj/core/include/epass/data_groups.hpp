// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <set>
#include <string>

#include "epass/common.hpp"

namespace epass {

/// Data group identifiers 1..16 of the logical data structure.
using DgSet = std::set<int>;

inline constexpr int kDgMrz = 1;
inline constexpr int kDgFace = 2;
inline constexpr int kDgFingerprint = 3;
inline constexpr int kDgIris = 4;
inline constexpr int kDgChipAuthKey = 14;
inline constexpr int kDgAaKey = 15;

/// Fingerprints and iris need terminal authentication.
constexpr bool is_sensitive(int dg) {
  return dg == kDgFingerprint || dg == kDgIris;
}

constexpr bool is_valid_dg(int dg) { return dg >= 1 && dg <= 16; }

DgSet intersect(const DgSet& a, const DgSet& b);
bool is_subset(const DgSet& inner, const DgSet& outer);

/// count(1) || ids ascending. Decoder rejects unsorted, duplicate or
/// out-of-range ids.
void encode_dg_set(Bytes& out, const DgSet& set);
DgSet decode_dg_set(ByteReader& in);

/// "{2,3}" style rendering for reports.
std::string format_dg_set(const DgSet& set);

}  // namespace epass
