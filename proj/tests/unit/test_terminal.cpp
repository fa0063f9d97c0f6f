// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>

#include "epass/scenarios.hpp"
#include "test_support.hpp"

namespace epass::terminal {
namespace {

using testing::Issued;

bool has_failure(const InspectionReport& r, std::string_view check,
                 std::string_view fragment = {}) {
  return std::any_of(r.failures.begin(), r.failures.end(), [&](const Failure& f) {
    return f.check == check && f.reason.find(fragment) != std::string::npos;
  });
}

class TerminalTest : public ::testing::Test {
 protected:
  scenarios::World world{77};
  Rng rng{3};
};

TEST_F(TerminalTest, GenuinePassportPassesEveryCheck) {
  Issued p = testing::issue_passport(world);
  auto chip = world.make_chip(p.perso);
  auto report = world.make_terminal().inspect(chip, p.mrz);
  EXPECT_TRUE(report.bac_ok);
  EXPECT_TRUE(report.pa_ok);
  EXPECT_TRUE(report.aa_ok);
  EXPECT_TRUE(report.chip_auth_ok);
  EXPECT_FALSE(report.ta_ok);
  EXPECT_TRUE(report.failures.empty());
  EXPECT_EQ(report.dgs_read, (DgSet{kDgMrz, kDgFace, kDgChipAuthKey, kDgAaKey}));
  for (int dg : report.dgs_read)
    EXPECT_EQ(report.data_groups.at(dg), p.perso.lds.data_groups.at(dg));
}

TEST_F(TerminalTest, WrongMrzStopsAfterBac) {
  Issued p = testing::issue_passport(world);
  auto chip = world.make_chip(p.perso);
  mrz::Mrz wrong = p.mrz;
  wrong.expiry_date = wrong.expiry_date.plus_days(1);
  auto report = world.make_terminal().inspect(chip, wrong);
  EXPECT_FALSE(report.bac_ok);
  EXPECT_TRUE(report.dgs_read.empty());
  EXPECT_TRUE(has_failure(report, "bac"));
  EXPECT_FALSE(report.transcript.has_phase(Phase::kSm));
}

TEST_F(TerminalTest, PassiveAuthenticationCatchesEverySingleByteMutation) {
  Issued p = testing::issue_passport(world);
  int detected = 0;
  int trials = 0;
  for (int dg : {kDgMrz, kDgFace, kDgChipAuthKey, kDgAaKey}) {
    for (int i = 0; i < 25; ++i, ++trials) {
      auto perso = p.perso;
      auto& content = perso.lds.data_groups.at(dg);
      content[rng.uniform(content.size())] ^= static_cast<std::uint8_t>(1 + rng.uniform(255));
      auto chip = world.make_chip(perso);
      auto report = world.make_terminal().inspect(chip, p.mrz);
      ASSERT_TRUE(report.bac_ok);
      if (!report.pa_ok &&
          has_failure(report, "pa", "DG" + std::to_string(dg) + " hash mismatch"))
        ++detected;
    }
  }
  EXPECT_EQ(detected, trials);
}

TEST_F(TerminalTest, TamperedSecurityObjectSignatureFails) {
  Issued p = testing::issue_passport(world);
  auto perso = p.perso;
  perso.lds.security_object.signature[5] ^= 0x40;
  auto chip = world.make_chip(perso);
  auto report = world.make_terminal().inspect(chip, p.mrz);
  EXPECT_FALSE(report.pa_ok);
  EXPECT_TRUE(has_failure(report, "pa"));
}

TEST_F(TerminalTest, UntrustedSignerIsReported) {
  Issued p = testing::issue_passport(world);
  auto chip = world.make_chip(p.perso);
  Terminal term({{}, {}}, rng.fork());
  auto report = term.inspect(chip, p.mrz);
  EXPECT_TRUE(report.bac_ok);
  EXPECT_FALSE(report.pa_ok);
  EXPECT_TRUE(has_failure(report, "pa", "unknown signer"));
}

TEST_F(TerminalTest, CloneIsCaughtByActiveAndChipAuthentication) {
  int caught = 0;
  for (int i = 0; i < 100; ++i) {
    Issued p = testing::issue_passport(world);
    auto genuine = world.make_chip(p.perso);
    auto clone = world.make_chip(p.perso.clone_without_keys());
    auto g = world.make_terminal().inspect(genuine, p.mrz);
    auto c = world.make_terminal().inspect(clone, p.mrz);
    bool ok = g.pa_ok && g.aa_ok && g.chip_auth_ok && c.pa_ok && !c.aa_ok && !c.chip_auth_ok;
    if (ok) ++caught;
  }
  EXPECT_EQ(caught, 100);
}

TEST_F(TerminalTest, DisabledChecksAreSkipped) {
  Issued p = testing::issue_passport(world, false, false, false);
  auto chip = world.make_chip(p.perso);
  InspectionOptions options;
  options.active_auth = false;
  options.chip_auth = false;
  auto report = world.make_terminal().inspect(chip, p.mrz, options);
  EXPECT_TRUE(report.pa_ok);
  EXPECT_FALSE(report.aa_ok);
  EXPECT_FALSE(report.chip_auth_ok);
  EXPECT_TRUE(report.failures.empty());
}

TEST_F(TerminalTest, EkeSessionReadsTheSameData) {
  Issued p = testing::issue_passport(world, true);
  auto chip = world.make_chip(p.perso);
  InspectionOptions options;
  options.use_eke = true;
  auto report = world.make_terminal().inspect(chip, p.mrz, options);
  EXPECT_TRUE(report.bac_ok);
  EXPECT_TRUE(report.pa_ok);
  EXPECT_TRUE(report.transcript.has_phase(Phase::kEke));
  EXPECT_FALSE(report.transcript.in_phase(Phase::kBac).size() > 2);  // select only
}

TEST_F(TerminalTest, EkeWithWrongMrzFails) {
  Issued p = testing::issue_passport(world, true);
  auto chip = world.make_chip(p.perso);
  InspectionOptions options;
  options.use_eke = true;
  mrz::Mrz wrong = p.mrz;
  wrong.document_number[0] = wrong.document_number[0] == 'P' ? 'Q' : 'P';
  auto report = world.make_terminal().inspect(chip, wrong, options);
  EXPECT_FALSE(report.bac_ok);
  EXPECT_TRUE(report.dgs_read.empty());
}

TEST_F(TerminalTest, TranscriptDecryptsToEveryPlaintext) {
  auto ta = testing::make_ta_setup(world.country(), rng);
  Issued p = testing::issue_passport(world);
  p.perso.current_date = Date::from_ymd(2025, 1, 1);
  auto chip = world.make_chip(p.perso);
  InspectionOptions options;
  options.terminal_auth = ta.terminal(rng, {kDgFingerprint}, Date::from_ymd(2025, 6, 1),
                                      Date::from_ymd(2026, 6, 1));
  auto term = world.make_terminal();
  auto report = term.inspect(chip, p.mrz, options);
  ASSERT_TRUE(report.ta_ok);
  ASSERT_GE(term.key_epochs().size(), 2u);  // BAC keys, then chip-auth keys
  auto decrypted = decrypt_transcript(report.transcript, term.key_epochs());
  EXPECT_EQ(decrypted, term.plaintext_log());
  EXPECT_FALSE(decrypted.empty());
}

TEST_F(TerminalTest, TranscriptNeverCarriesKeys) {
  Issued p = testing::issue_passport(world);
  auto chip = world.make_chip(p.perso);
  auto term = world.make_terminal();
  auto report = term.inspect(chip, p.mrz);
  auto text = report.transcript.to_jsonl();
  for (const auto& epoch : term.key_epochs()) {
    EXPECT_EQ(text.find(to_hex(epoch.keys.enc_key)), std::string::npos);
    EXPECT_EQ(text.find(to_hex(epoch.keys.mac_key)), std::string::npos);
  }
  auto bac = crypto::derive_keys(crypto::derive_seed(mrz::mrz_info(p.mrz)).seed);
  EXPECT_EQ(text.find(to_hex(bac.enc_key)), std::string::npos);
  EXPECT_EQ(report.to_json().find(to_hex(report.data_groups.at(kDgFace))), std::string::npos);
}

TEST_F(TerminalTest, TranscriptPhasesFollowProtocolOrder) {
  auto ota = testing::make_online_ta(world);
  Issued p = testing::issue_passport(world);
  auto chip = world.make_chip(p.perso);
  InspectionOptions options;
  options.online_ta = ota.creds;
  auto report = world.make_terminal().inspect(chip, p.mrz, options);
  ASSERT_TRUE(report.ta_ok);
  const auto& entries = report.transcript.entries();
  ASSERT_FALSE(entries.empty());
  EXPECT_EQ(entries.front().phase, Phase::kUid);
  EXPECT_TRUE(report.transcript.has_phase(Phase::kOnlineTa));
  // Access control precedes every protected exchange.
  auto first_sm = std::find_if(entries.begin(), entries.end(),
                               [](const auto& e) { return e.phase >= Phase::kSm; });
  EXPECT_TRUE(std::none_of(first_sm, entries.end(), [](const auto& e) {
    return e.phase == Phase::kUid || e.phase == Phase::kBac;
  }));
  EXPECT_EQ(Transcript::from_jsonl(report.transcript.to_jsonl()), report.transcript);
}

TEST_F(TerminalTest, SensitiveGroupsOnlyWithTerminalAuthentication) {
  auto ta = testing::make_ta_setup(world.country(), rng);
  for (int i = 0; i < 20; ++i) {
    Issued p = testing::issue_passport(world);
    p.perso.current_date = Date::from_ymd(2024, 1, 1);
    auto chip = world.make_chip(p.perso);
    InspectionOptions options;
    if (rng.uniform(2)) {
      Date from = Date::from_ymd(2022, 1, 1).plus_days(static_cast<int>(rng.uniform(1200)));
      options.terminal_auth = ta.terminal(rng, {kDgFingerprint}, from, from.plus_days(90));
    }
    auto report = world.make_terminal().inspect(chip, p.mrz, options);
    bool sensitive = std::any_of(report.data_groups.begin(), report.data_groups.end(),
                                 [](const auto& kv) { return is_sensitive(kv.first); });
    EXPECT_TRUE(!sensitive || report.ta_ok) << i;
  }
}

TEST_F(TerminalTest, OutcomeIsAFunctionOfTheSeed) {
  auto run = [](std::uint64_t seed) {
    scenarios::World w(seed);
    Issued p = testing::issue_passport(w);
    auto chip = w.make_chip(p.perso);
    auto report = w.make_terminal().inspect(chip, p.mrz);
    return std::make_pair(report.to_json(), report.transcript.to_jsonl());
  };
  EXPECT_EQ(run(5), run(5));
  EXPECT_NE(run(5).second, run(6).second);
}

TEST_F(TerminalTest, FixedChallengeSourceIsUsed) {
  Issued p = testing::issue_passport(world);
  auto chip = world.make_chip(p.perso);
  ByteArray<8> fixed{1, 2, 3, 4, 5, 6, 7, 8};
  auto term = world.make_terminal([&] { return fixed; });
  auto report = term.inspect(chip, p.mrz);
  ASSERT_TRUE(report.aa_ok);
  ASSERT_TRUE(term.last_aa());
  EXPECT_EQ(term.last_aa()->challenge, fixed);
  EXPECT_TRUE(crypto::verify(p.perso.lds.data_groups.at(kDgAaKey), fixed,
                             term.last_aa()->signature));
}

}  // namespace
}  // namespace epass::terminal
