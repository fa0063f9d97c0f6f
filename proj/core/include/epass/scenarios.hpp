// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "epass/attacks.hpp"
#include "epass/chip.hpp"
#include "epass/pki.hpp"
#include "epass/terminal.hpp"

// Ready-made worlds and the end-to-end demonstrations built on them. Every
// function is a pure function of its seed.
namespace epass::scenarios {

/// Numbering used for generated passports: "P" followed by 8 digits, twenty
/// million documents in circulation.
mrz::SequentialNumbering demo_numbering();

/// A random but valid MRZ for a passport issued within the five years
/// before `today`.
mrz::Mrz sample_mrz(Rng& rng, Date today, const std::string& country = "UTO");

/// One issuing country with its key material, a simulated clock and the
/// seeded generator everything else forks from.
class World {
 public:
  explicit World(std::uint64_t seed, std::string country = "UTO",
                 Date today = Date::from_ymd(2026, 1, 1));

  Rng& rng() { return rng_; }
  SimClock& clock() { return clock_; }
  const pki::CountryPki& country() const { return country_; }
  chip::TrustStore trust() const;

  chip::PassportSpec passport_spec(const mrz::Mrz& mrz) const;
  chip::Personalization issue(const chip::PassportSpec& spec);
  chip::Personalization issue(const mrz::Mrz& mrz) { return issue(passport_spec(mrz)); }

  chip::Chip make_chip(chip::Personalization perso);
  terminal::Terminal make_terminal(terminal::ChallengeSource aa = {});

 private:
  Rng rng_;
  SimClock clock_;
  pki::CountryPki country_;
};

struct RecordedSession {
  mrz::Mrz mrz;
  Transcript transcript;
  terminal::InspectionReport report;
};

/// Issues a passport and records one honest inspection of it.
RecordedSession record_session(World& world, bool eke);

struct StolenTerminalOutcome {
  bool stale_chip_accepts = false;       // before it saw a newer certificate
  bool stale_chip_rejects_after_update = false;
  bool fresh_chip_rejects = false;
  Date stale_date_before;
  Date stale_date_after;
  Date stolen_expiry;

  std::string summary() const;
};

/// A terminal certificate that expired in the real world is presented to a
/// chip whose clock is stale, then again after a genuine newer chain updated
/// that clock, and finally to a chip with a recent clock.
StolenTerminalOutcome stolen_terminal_demo(std::uint64_t seed);

struct EkeDemoOutcome {
  std::string truth;  // MrzInfo of the inspected passport
  attacks::AttackResult classic;
  attacks::AttackResult eke;
  std::uint64_t space_size = 0;

  std::string summary() const;
};

/// Records a classic and an EKE session of the same passport and runs the
/// offline search against both over a 2^space_bits neighborhood.
EkeDemoOutcome eke_demo(std::uint64_t seed, int space_bits = 10,
                        unsigned workers = 1);

struct SubliminalOutcome {
  attacks::UniformityReport uniformity;
  std::size_t decode_trials = 0;
  std::size_t decoded_correctly = 0;
  std::size_t random_trials = 0;
  std::size_t random_rejected = 0;

  std::string summary() const;
};

/// Chips leaking their document number through encrypted UIDs: uniformity of
/// `samples` UIDs, decoding with the private key, and decoding random UIDs.
SubliminalOutcome subliminal_demo(std::uint64_t seed, std::size_t samples = 10000,
                                  std::size_t decode_trials = 100);

}  // namespace epass::scenarios
