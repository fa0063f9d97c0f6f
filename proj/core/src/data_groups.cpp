// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "epass/data_groups.hpp"

#include <algorithm>
#include <iterator>

namespace epass {

DgSet intersect(const DgSet& a, const DgSet& b) {
  DgSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(out, out.end()));
  return out;
}

bool is_subset(const DgSet& inner, const DgSet& outer) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

void encode_dg_set(Bytes& out, const DgSet& set) {
  out.push_back(static_cast<std::uint8_t>(set.size()));
  for (int dg : set) {
    if (!is_valid_dg(dg)) throw InvalidInput("data group id out of range");
    out.push_back(static_cast<std::uint8_t>(dg));
  }
}

DgSet decode_dg_set(ByteReader& in) {
  std::size_t n = in.u8();
  DgSet out;
  int previous = 0;
  for (std::size_t i = 0; i < n; ++i) {
    int dg = in.u8();
    if (!is_valid_dg(dg) || dg <= previous)
      throw ProtocolError("data group set is not canonical");
    out.insert(dg);
    previous = dg;
  }
  return out;
}

std::string format_dg_set(const DgSet& set) {
  std::string out = "{";
  for (int dg : set) {
    if (out.size() > 1) out += ",";
    out += "DG" + std::to_string(dg);
  }
  return out + "}";
}

}  // namespace epass
