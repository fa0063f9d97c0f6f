// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "cli_common.hpp"

int main(int argc, char** argv) {
  using namespace epasslab;
  CLI::App app{"epasslab: simulated e-passports and attacks on their protocols"};
  app.require_subcommand(1);
  // Subcommands inherit this, so --seed and --out work after the command name.
  app.fallthrough();
  app.set_version_flag("--version", "epasslab 0.1.0");

  Globals g;
  Action action;
  app.add_option("--seed", g.seed, "Seed of the single random generator")
      ->capture_default_str();
  app.add_option("--out", g.out, "Write the primary output here instead of stdout");

  add_session_commands(app, g, action);
  add_analysis_commands(app, g, action);
  add_pki_commands(app, g, action);
  add_backoffice_commands(app, g, action);
  add_demo_commands(app, g, action);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const epass::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const epass::SpaceTooLarge& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << "\n";
    return kExitFailure;
  }
}
