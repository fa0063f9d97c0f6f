// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

// entropy-report, attack-offline

#include <nlohmann/json.hpp>

#include <cmath>
#include <iomanip>
#include <memory>
#include <sstream>
#include <thread>

#include "cli_common.hpp"
#include "epass/attacks.hpp"
#include "epass/candidate_space.hpp"
#include "epass/io.hpp"

namespace epasslab {

namespace {

using namespace epass;

struct EntropyOptions {
  std::string policy;
  std::optional<int> age_within;
  std::optional<int> validity_years;
  bool no_working_days = false;
  std::optional<std::uint64_t> sequential_population;
  std::size_t known_pairs = 0;
  bool json = false;
};

/// `k` pairs spread evenly over the numbering range and validity window, as
/// an attacker collecting sample passports would see them.
std::vector<mrz::KnownPair> synthetic_pairs(const mrz::IssuancePolicy& p,
                                            const mrz::AttackerAssumptions& a,
                                            std::size_t k) {
  std::vector<mrz::KnownPair> out;
  const int window = p.validity_years * 365;
  for (std::size_t i = 1; i <= k; ++i) {
    auto n = p.sequential.first_number + p.sequential.max_population * i / (k + 1);
    auto offset = static_cast<int>(static_cast<std::uint64_t>(window) * i / (k + 1));
    out.push_back({p.sequential.render(n), a.as_of.plus_days(offset)});
  }
  return out;
}

int entropy_report(const Globals& g, const EntropyOptions& o) {
  io::PolicyFile file;
  if (!o.policy.empty()) file = io::policy_from_json(io::read_file(o.policy));
  auto& p = file.policy;
  auto& a = file.assumptions;
  if (o.age_within) a.age_known_within_years = *o.age_within;
  if (o.validity_years) p.validity_years = *o.validity_years;
  if (o.no_working_days) p.working_days_only = false;
  if (o.sequential_population) {
    p.number_scheme = mrz::NumberScheme::kSequentialNumeric;
    p.sequential.max_population = *o.sequential_population;
  }
  if (o.known_pairs > 0) {
    if (p.number_scheme != mrz::NumberScheme::kSequentialNumeric)
      throw InvalidInput("--known-pairs: needs sequential numbering");
    p.known_pairs = synthetic_pairs(p, a, o.known_pairs);
  }

  auto r = mrz::field_entropy(p, a);
  // Enumeration needs concrete windows; an age range alone only has entropy.
  std::optional<double> count;
  try {
    count = static_cast<double>(mrz::candidate_count(p, a));
  } catch (const InvalidInput&) {
  }

  if (o.json) {
    nlohmann::ordered_json j;
    j["birth_bits"] = r.birth_bits;
    j["expiry_bits"] = r.expiry_bits;
    j["number_bits"] = r.number_bits;
    j["reduction_bits"] = r.reduction_bits;
    j["effective_number_bits"] = r.effective_number_bits();
    j["total_bits"] = r.total_bits;
    j["candidate_count"] = count ? nlohmann::ordered_json(*count) : nlohmann::ordered_json(nullptr);
    emit(g, j.dump(2) + "\n");
    return kExitOk;
  }

  std::ostringstream s;
  s << std::fixed << std::setprecision(4);
  s << "birth date      " << std::setw(9) << r.birth_bits << " bits\n"
    << "expiry date     " << std::setw(9) << r.expiry_bits << " bits\n"
    << "document number " << std::setw(9) << r.number_bits << " bits\n";
  if (r.reduction_bits > 0)
    s << "known pairs     " << std::setw(9) << -r.reduction_bits << " bits\n";
  s << "total           " << std::setw(9) << r.total_bits << " bits\n";
  if (count) s << "candidates      " << std::setprecision(0) << *count << "\n";
  emit(g, s.str());
  return kExitOk;
}

struct AttackOptions {
  std::string transcript;
  std::string policy;
  double space_cap = mrz::kDefaultSpaceCapBits;
  unsigned workers = 0;
};

int attack_offline(const Globals& g, const AttackOptions& o) {
  auto transcript = Transcript::from_jsonl(io::read_file(o.transcript));
  auto file = io::policy_from_json(io::read_file(o.policy));
  auto space = mrz::candidate_space(file.policy, file.assumptions, o.space_cap);
  unsigned workers = o.workers ? o.workers : std::max(1u, std::thread::hardware_concurrency());
  auto result = attacks::offline_search(transcript, space, workers);
  emit(g, result.to_json());
  return result.survivors.empty() ? kExitFailure : kExitOk;
}

}  // namespace

void add_analysis_commands(CLI::App& app, Globals& g, Action& action) {
  auto ent = std::make_shared<EntropyOptions>();
  auto* cmd = app.add_subcommand("entropy-report", "Estimate the entropy of the BAC key");
  cmd->add_option("--policy", ent->policy, "Issuance policy and attacker assumptions (JSON)");
  cmd->add_option("--age-within", ent->age_within, "Holder's age known within N years")
      ->check(CLI::Range(1, 100));
  cmd->add_option("--validity-years", ent->validity_years)->check(CLI::Range(1, 20));
  cmd->add_flag("--no-working-days", ent->no_working_days,
                "Expiry dates may fall on any day");
  cmd->add_option("--sequential-population", ent->sequential_population,
                  "Sequential numbering with this many documents in circulation");
  cmd->add_option("--known-pairs", ent->known_pairs,
                  "Number of known (document number, expiry) pairs");
  cmd->add_flag("--json", ent->json);
  cmd->callback([&g, &action, ent] { action = [&g, ent] { return entropy_report(g, *ent); }; });

  auto att = std::make_shared<AttackOptions>();
  cmd = app.add_subcommand("attack-offline", "Search MRZ candidates against a transcript");
  cmd->add_option("--transcript", att->transcript, "JSON-lines transcript")->required();
  cmd->add_option("--policy", att->policy, "Issuance policy and attacker assumptions")
      ->required();
  cmd->add_option("--space-cap", att->space_cap, "Refuse spaces above this many bits");
  cmd->add_option("--workers", att->workers, "Worker threads (default: all cores)")
      ->check(CLI::Range(1u, 1024u));
  cmd->callback([&g, &action, att] { action = [&g, att] { return attack_offline(g, *att); }; });
}

}  // namespace epasslab
