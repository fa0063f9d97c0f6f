// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

// demo stolen-terminal|subliminal-uid|challenge-semantics|eke
//
// Each demo exits 0 when the outcome is the one the attack predicts.

#include <nlohmann/json.hpp>

#include <memory>

#include "cli_common.hpp"
#include "epass/scenarios.hpp"

namespace epasslab {

namespace {

using namespace epass;

struct DemoOptions {
  std::size_t samples = 10000;
  std::size_t trials = 100;
  int bits = 10;
  unsigned workers = 1;
  std::string date = "2026-01-01";
  int minute = 600;
  std::uint16_t location = 1;
  bool no_aa = false;
};

int stolen_terminal(const Globals& g) {
  auto r = scenarios::stolen_terminal_demo(g.seed);
  emit(g, r.summary());
  return r.stale_chip_accepts && r.stale_chip_rejects_after_update && r.fresh_chip_rejects
             ? kExitOk
             : kExitFailure;
}

int subliminal_uid(const Globals& g, const DemoOptions& o) {
  auto r = scenarios::subliminal_demo(g.seed, o.samples, o.trials);
  emit(g, r.summary());
  bool expected = !r.uniformity.flagged_nonrandom && r.decoded_correctly == r.decode_trials &&
                  r.random_rejected == r.random_trials;
  return expected ? kExitOk : kExitFailure;
}

int challenge_semantics(const Globals& g, const DemoOptions& o) {
  scenarios::World world(g.seed);
  auto mrz = scenarios::sample_mrz(world.rng(), world.clock().today(), world.country().country);
  auto spec = world.passport_spec(mrz);
  spec.with_active_auth = !o.no_aa;
  auto chip = world.make_chip(world.issue(spec));

  attacks::BorderEvent event{parse_date_flag(o.date, "--date"), o.minute, o.location};
  const auto trust = world.trust();
  auto outcome = attacks::challenge_semantics_demo(chip, mrz, event, trust,
                                                   world.rng().fork());
  nlohmann::ordered_json j;
  j["applicable"] = outcome.applicable;
  if (outcome.evidence) {
    j["evidence"] = nlohmann::ordered_json::parse(outcome.evidence->to_json());
    j["verifies"] = attacks::verify_evidence(*outcome.evidence, nullptr);
    j["verifies_with_passive_auth"] = attacks::verify_evidence(*outcome.evidence, &trust);
  } else {
    j["reason"] = outcome.reason;
  }
  emit(g, j.dump(2) + "\n");
  // Without active authentication there is nothing to prove, which is also
  // the expected result.
  if (o.no_aa) return outcome.applicable ? kExitFailure : kExitOk;
  return outcome.evidence && attacks::verify_evidence(*outcome.evidence, &trust)
             ? kExitOk
             : kExitFailure;
}

int eke(const Globals& g, const DemoOptions& o) {
  auto r = scenarios::eke_demo(g.seed, o.bits, o.workers);
  emit(g, r.summary());
  bool expected = r.classic.survivors.size() == 1 && r.eke.survivors.size() == r.space_size;
  return expected ? kExitOk : kExitFailure;
}

}  // namespace

void add_demo_commands(CLI::App& app, Globals& g, Action& action) {
  auto o = std::make_shared<DemoOptions>();
  auto* demo = app.add_subcommand("demo", "End-to-end attack demonstrations");
  demo->require_subcommand(1);

  auto* cmd = demo->add_subcommand("stolen-terminal",
                                   "Expired terminal certificate against chip clocks");
  cmd->callback([&g, &action] { action = [&g] { return stolen_terminal(g); }; });

  cmd = demo->add_subcommand("subliminal-uid", "Document numbers hidden in random UIDs");
  cmd->add_option("--samples", o->samples, "UIDs for the uniformity test")
      ->check(CLI::Range(256, 10'000'000));
  cmd->add_option("--trials", o->trials, "Chips to decode")->check(CLI::Range(1, 100000));
  cmd->callback([&g, &action, o] { action = [&g, o] { return subliminal_uid(g, *o); }; });

  cmd = demo->add_subcommand("challenge-semantics",
                             "Active-authentication challenges as signed evidence");
  cmd->add_option("--date", o->date, "Date of the border crossing");
  cmd->add_option("--minute", o->minute, "Minute of the day")->check(CLI::Range(0, 1439));
  cmd->add_option("--location", o->location, "Checkpoint number");
  cmd->add_flag("--no-aa", o->no_aa, "Issue the passport without active authentication");
  cmd->callback(
      [&g, &action, o] { action = [&g, o] { return challenge_semantics(g, *o); }; });

  cmd = demo->add_subcommand("eke", "Offline search against BAC and EKE transcripts");
  cmd->add_option("--bits", o->bits, "log2 of the candidate space")->check(CLI::Range(1, 24));
  cmd->add_option("--workers", o->workers)->check(CLI::Range(1u, 1024u));
  cmd->callback([&g, &action, o] { action = [&g, o] { return eke(g, *o); }; });
}

}  // namespace epasslab
