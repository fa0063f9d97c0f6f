// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli_common.hpp"

#include <iostream>
#include <sstream>

#include "epass/io.hpp"

namespace epasslab {

void emit(const Globals& g, const std::string& content) {
  if (g.out.empty() || g.out == "-")
    std::cout << content << std::flush;
  else
    epass::io::write_file(g.out, content);
}

epass::Date parse_date_flag(const std::string& value, const char* flag) {
  try {
    return epass::Date::parse_iso(value);
  } catch (const epass::InvalidInput&) {
    throw epass::InvalidInput(std::string(flag) + ": expected YYYY-MM-DD, got '" +
                              value + "'");
  }
}

epass::DgSet parse_dgs_flag(const std::string& value, const char* flag) {
  epass::DgSet out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    int dg = 0;
    try {
      std::size_t used = 0;
      dg = std::stoi(item, &used);
      if (used != item.size()) dg = 0;
    } catch (const std::exception&) {
      dg = 0;
    }
    if (!epass::is_valid_dg(dg))
      throw epass::InvalidInput(std::string(flag) + ": '" + item +
                                "' is not a data group id 1..16");
    out.insert(dg);
  }
  return out;
}

}  // namespace epasslab
