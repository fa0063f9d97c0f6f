// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "epass/common.hpp"
#include "epass/data_groups.hpp"
#include "epass/date.hpp"

namespace epasslab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Flags shared by every subcommand.
struct Globals {
  std::uint64_t seed = 1;
  std::string out;
};

/// The selected subcommand; set by its CLI11 callback and run after parsing.
using Action = std::function<int()>;

/// Writes to --out when given, otherwise to stdout.
void emit(const Globals& g, const std::string& content);

epass::Date parse_date_flag(const std::string& value, const char* flag);
epass::DgSet parse_dgs_flag(const std::string& value, const char* flag);

void add_session_commands(CLI::App& app, Globals& g, Action& action);
void add_analysis_commands(CLI::App& app, Globals& g, Action& action);
void add_pki_commands(CLI::App& app, Globals& g, Action& action);
void add_backoffice_commands(CLI::App& app, Globals& g, Action& action);
void add_demo_commands(CLI::App& app, Globals& g, Action& action);

}  // namespace epasslab
