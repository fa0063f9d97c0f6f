// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

// Runs the epasslab binary as a user would and checks exit codes and output.

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "epass/io.hpp"
#include "epass/scenarios.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(EPASS_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

bool contains(const std::string& haystack, std::string_view needle) {
  return haystack.find(needle) != std::string::npos;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("epcli-" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  /// Runs and requires exit 0, returning stdout.
  std::string ok(const std::string& args) {
    auto r = run(args);
    EXPECT_EQ(r.code, 0) << args << "\n" << r.out;
    return r.out;
  }

  void country_and_passport(std::uint64_t seed = 7) {
    ok("pki init-country --seed " + std::to_string(seed) + " --out " + path("country.json"));
    ok("gen-passport --seed " + std::to_string(seed + 1) + " --country-keys " +
       path("country.json") + " --out " + path("passport.json"));
  }

  fs::path dir_;
};

TEST_F(CliTest, DutchEntropyScenario) {
  auto start = std::chrono::steady_clock::now();
  auto out = ok("entropy-report --age-within 5 --sequential-population 20000000 --known-pairs 15");
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(1));
  EXPECT_TRUE(contains(out, "birth date        10.8347 bits")) << out;
  EXPECT_TRUE(contains(out, "document number   24.2535 bits")) << out;
  EXPECT_TRUE(contains(out, "total             41.4374 bits")) << out;
}

TEST_F(CliTest, UnconstrainedEntropyAsJson) {
  auto j = json::parse(ok("entropy-report --json"));
  EXPECT_NEAR(j["birth_bits"].get<double>(), 15.16, 0.01);
  EXPECT_NEAR(j["expiry_bits"].get<double>(), 10.34, 0.01);
  EXPECT_NEAR(j["number_bits"].get<double>(), 46.53, 0.01);
  EXPECT_NEAR(j["total_bits"].get<double>(), 72.03, 0.01);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("no-such-command").code, 2);
  EXPECT_EQ(run("run-session").code, 2);  // --passport is required
  EXPECT_EQ(run("entropy-report --policy " + path("missing.json")).code, 2);
}

TEST_F(CliTest, MalformedInputNamesTheField) {
  country_and_passport();
  auto j = json::parse(epass::io::read_file(path("passport.json")));
  j["current_date"] = "someday";
  epass::io::write_file(path("bad.json"), j.dump());
  auto r = run("run-session --passport " + path("bad.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.out, "current_date")) << r.out;
}

TEST_F(CliTest, GeneratedPassportPassesInspection) {
  country_and_passport();
  auto out = ok("run-session --passport " + path("passport.json") + " --country-keys " +
                path("country.json") + " --transcript " + path("t.jsonl"));
  auto report = json::parse(out);
  EXPECT_TRUE(report["bac_ok"].get<bool>());
  EXPECT_TRUE(report["pa_ok"].get<bool>());
  EXPECT_TRUE(report["aa_ok"].get<bool>());
  EXPECT_TRUE(fs::exists(path("t.jsonl")));
  EXPECT_NO_THROW(epass::Transcript::from_jsonl(epass::io::read_file(path("t.jsonl"))));
}

TEST_F(CliTest, WrongMrzFailsWithExitOne) {
  country_and_passport();
  auto r = run("run-session --passport " + path("passport.json") + " --country-keys " +
               path("country.json") + " --document-number X00000000");
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(json::parse(r.out)["bac_ok"].get<bool>());
}

TEST_F(CliTest, OfflineAttackRecoversTheMrz) {
  country_and_passport();
  ok("run-session --passport " + path("passport.json") + " --country-keys " +
     path("country.json") + " --transcript " + path("t.jsonl"));
  auto perso = epass::io::personalization_from_json(epass::io::read_file(path("passport.json")));
  auto numbering = epass::scenarios::demo_numbering();
  auto n = numbering.parse(perso.mrz.document_number);
  ASSERT_TRUE(n);

  epass::io::PolicyFile f;
  f.policy.working_days_only = false;
  f.policy.number_scheme = epass::mrz::NumberScheme::kSequentialNumeric;
  f.policy.sequential = numbering;
  f.assumptions.known_birth_date = perso.mrz.birth_date;
  f.assumptions.expiry_window = epass::DateRange{perso.mrz.expiry_date.plus_days(-3), 8};
  f.assumptions.number_window = {{*n >= 100 ? *n - 100 : 0, 512}};
  epass::io::write_file(path("policy.json"), epass::io::policy_to_json(f));

  auto j = json::parse(ok("attack-offline --transcript " + path("t.jsonl") + " --policy " +
                          path("policy.json") + " --workers 2"));
  ASSERT_EQ(j["survivors"].size(), 1u);
  EXPECT_EQ(j["survivors"][0].get<std::string>(), epass::mrz::mrz_info(perso.mrz).value());

  f.assumptions.known_birth_date = perso.mrz.birth_date.plus_days(2);
  epass::io::write_file(path("policy2.json"), epass::io::policy_to_json(f));
  auto miss = run("attack-offline --transcript " + path("t.jsonl") + " --policy " +
                  path("policy2.json"));
  EXPECT_EQ(miss.code, 1);
}

TEST_F(CliTest, OversizedSpaceIsRefused) {
  country_and_passport();
  ok("run-session --passport " + path("passport.json") + " --country-keys " +
     path("country.json") + " --transcript " + path("t.jsonl"));
  epass::io::write_file(path("policy.json"), epass::io::policy_to_json({}));
  auto r = run("attack-offline --transcript " + path("t.jsonl") + " --policy " +
               path("policy.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(contains(r.out, "refused")) << r.out;
}

TEST_F(CliTest, StolenTerminalDemo) {
  auto out = ok("demo stolen-terminal --seed 3");
  EXPECT_TRUE(contains(out, "stale-clock chip (current_date")) << out;
  EXPECT_TRUE(contains(out, "): ACCEPTED")) << out;
  EXPECT_TRUE(contains(out, "fresh-clock chip: REJECTED")) << out;
  EXPECT_EQ(out, ok("demo stolen-terminal --seed 3"));
}

TEST_F(CliTest, DemosAreDeterministicUnderASeed) {
  for (std::string demo : {"demo eke --bits 6", "demo subliminal-uid --samples 500 --trials 10",
                           "demo challenge-semantics", "gen-passport"}) {
    auto a = ok(demo + " --seed 42");
    auto b = ok(demo + " --seed 42");
    EXPECT_EQ(a, b) << demo;
    EXPECT_NE(a, ok(demo + " --seed 43")) << demo;
  }
}

TEST_F(CliTest, EkeDemoDefeatsTheSearch) {
  auto out = ok("demo eke --bits 8 --seed 2");
  EXPECT_TRUE(contains(out, "classic BAC transcript: 1 survivor(s)")) << out;
  EXPECT_TRUE(contains(out, "EKE transcript:         256 survivor(s)")) << out;
}

TEST_F(CliTest, FingerprintTellsSuppliersApart) {
  ok("gen-passport --seed 1 --profile vendor-a --out " + path("a.json"));
  ok("gen-passport --seed 2 --profile vendor-b --out " + path("b.json"));
  ok("gen-passport --seed 3 --profile vendor-a --out " + path("c.json"));
  auto diff = ok("fingerprint --passport " + path("a.json") + " --passport " + path("b.json"));
  EXPECT_TRUE(contains(diff, "\"distinguishable\": true")) << diff;
  auto same = ok("fingerprint --passport " + path("a.json") + " --passport " + path("c.json"));
  EXPECT_TRUE(contains(same, "\"distinguishable\": false")) << same;
}

TEST_F(CliTest, CertificateLifecycle) {
  ok("pki init-country --seed 9 --out " + path("country.json"));
  ok("pki keygen --seed 10 --id DV1 --role dv --rights 3,4 --out " + path("dv.json"));
  ok("pki keygen --seed 11 --id IS1 --role is --rights 3 --out " + path("is.json"));
  ok("pki issue-root --country-keys " + path("country.json") +
     " --from 2020-01-01 --to 2035-01-01 --out " + path("root.json"));
  ok("pki issue --country-keys " + path("country.json") + " --subject-key " + path("dv.json") +
     " --from 2024-01-01 --to 2027-01-01 --out " + path("dv-cert.json"));
  ok("pki issue --issuer-key " + path("dv.json") + " --subject-key " + path("is.json") +
     " --from 2025-01-01 --to 2025-04-01 --out " + path("is-cert.json"));

  auto chain = json::array();
  for (auto f : {"root.json", "dv-cert.json", "is-cert.json"})
    for (auto& c : json::parse(epass::io::read_file(path(f)))) chain.push_back(c);
  epass::io::write_file(path("chain.json"), chain.dump());

  auto verify = "pki verify --chain " + path("chain.json") + " --country-keys " +
                path("country.json");
  ok(verify + " --as-of 2025-02-01");
  EXPECT_EQ(run(verify + " --as-of 2025-05-01").code, 1);
  EXPECT_EQ(run(verify + " --as-of 2024-06-01").code, 1);
  ok(verify + " --as-of 2024-06-01 --expiry-only");
  EXPECT_TRUE(contains(ok("pki dump --cert " + path("is-cert.json")), "IS1"));

  auto escalate = run("pki issue --issuer-key " + path("is.json") + " --subject-key " +
                      path("dv.json") + " --from 2025-01-01 --to 2025-04-01");
  EXPECT_EQ(escalate.code, 2) << escalate.out;
}

TEST_F(CliTest, OnlineTerminalAuthenticationThroughTheBackOffice) {
  country_and_passport(21);
  ok("pki keygen --seed 30 --id AUTH --role cvca-root --out " + path("auth.json"));
  ok("pki keygen --seed 31 --id TERM --role application-authority --rights 3 --out " +
     path("term.json"));
  ok("pki issue --issuer-key " + path("auth.json") + " --subject-key " + path("term.json") +
     " --from 2020-01-01 --to 2035-01-01 --out " + path("caa.json"));

  std::string sock = path("bo.sock");
  std::string serve = std::string(EPASS_CLI) + " backoffice serve --socket " + sock +
                      " --country-keys " + path("country.json") + " --registry " +
                      path("registry.json") + " > " + path("serve.log") + " 2>&1 & echo $! > " +
                      path("serve.pid");
  ASSERT_EQ(std::system(serve.c_str()), 0);
  for (int i = 0; i < 100 && !fs::exists(sock); ++i)
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  ASSERT_TRUE(fs::exists(sock));

  ok("backoffice register --socket " + sock + " --key " + path("auth.json") + " --rights 3");
  auto session = "run-session --passport " + path("passport.json") + " --country-keys " +
                 path("country.json") + " --online-ta-cert " + path("caa.json") +
                 " --online-ta-key " + path("term.json") + " --backoffice-socket " + sock;
  auto granted = json::parse(ok(session));
  EXPECT_TRUE(granted["ta_ok"].get<bool>());
  EXPECT_EQ(granted["rights"], json::array({3}));

  ok("backoffice revoke --socket " + sock + " --key " + path("term.json"));
  auto listed = ok("backoffice list --socket " + sock);
  EXPECT_TRUE(contains(listed, "revoked")) << listed;
  auto refused = run(session);
  EXPECT_EQ(refused.code, 1);
  EXPECT_TRUE(contains(refused.out, "grant carries no rights")) << refused.out;

  ok("backoffice reinstate --socket " + sock + " --key " + path("term.json"));
  EXPECT_TRUE(json::parse(ok(session))["ta_ok"].get<bool>());

  auto pid = epass::io::read_file(path("serve.pid"));
  EXPECT_EQ(std::system(("kill " + pid).c_str()), 0);
  for (int i = 0; i < 100 && fs::exists(sock); ++i)
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  EXPECT_TRUE(fs::exists(path("registry.json")));

  auto down = run(session);
  EXPECT_EQ(down.code, 1);
  EXPECT_TRUE(contains(down.out, "back office did not answer")) << down.out;
}

}  // namespace
