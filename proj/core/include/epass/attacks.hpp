// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "epass/candidate_space.hpp"
#include "epass/chip.hpp"
#include "epass/terminal.hpp"
#include "epass/transcript.hpp"

namespace epass::attacks {

// ---------------------------------------------------------------------------
// Offline key recovery

/// What an eavesdropper keeps from one access-control run.
struct Observation {
  enum class Kind { kBac, kEke };
  Kind kind = Kind::kBac;
  ByteArray<8> rnd_icc{};       // kBac: chip challenge
  Bytes terminal_cryptogram;    // kBac: E_ifd || M_ifd
  Bytes chip_cryptogram;        // kBac: E_icc || M_icc, empty if rejected
  Bytes eke_message;            // kEke: terminal's masked public value
};

/// Picks the last access-control run of the transcript. Throws InvalidInput
/// if it has neither a BAC nor an EKE phase.
Observation extract_observation(const Transcript& transcript);

/// True when the candidate's keys explain the observation. For BAC both MACs
/// and the echoed challenges must match.
bool candidate_matches(const Observation& obs, const mrz::MrzInfo& candidate);

struct AttackResult {
  std::uint64_t candidates_tried = 0;
  std::vector<mrz::MrzInfo> survivors;  // ascending
  std::chrono::duration<double> elapsed{0};
  double throughput = 0;  // candidates per second
  Observation::Kind kind = Observation::Kind::kBac;

  std::string to_json() const;
};

/// Tries every candidate of `space` against the transcript on `workers`
/// threads. The survivor set does not depend on `workers`.
AttackResult offline_search(const Transcript& transcript,
                            const mrz::CandidateSpace& space, unsigned workers);

/// Sequential-number space around a known passport: 2^number_bits numbers
/// times 2^expiry_bits expiry days, birth date known. The true MrzInfo sits
/// at an rng-chosen offset.
mrz::CandidateSpace neighborhood_space(const mrz::Mrz& truth,
                                       const mrz::SequentialNumbering& numbering,
                                       int number_bits, int expiry_bits, Rng& rng);

// ---------------------------------------------------------------------------
// Traceability

struct Probe {
  std::string name;
  Bytes frame;
};

/// Unusual pre-BAC input: unknown AIDs, unknown instructions, wrong class,
/// unprotected reads, malformed frames.
std::vector<Probe> default_probes();

enum class UidBehavior { kFixed, kVarying };
std::string_view to_string(UidBehavior b);

struct ChipFingerprint {
  Bytes atr;
  UidBehavior uid_behavior = UidBehavior::kVarying;
  std::map<std::string, std::uint16_t> error_profile;
  std::map<std::string, chip::Millis> timing_profile;

  bool operator==(const ChipFingerprint&) const = default;
  std::string to_json() const;
};

/// Builds a fingerprint from `power_cycles` power-ups and the probe set.
/// Throws InvalidInput if a probe is an access-control step or protected.
ChipFingerprint fingerprint(chip::ChipEndpoint& endpoint,
                            std::span<const Probe> probes, const SimClock& clock,
                            int power_cycles = 2);

inline bool distinguish(const ChipFingerprint& a, const ChipFingerprint& b) {
  return a != b;
}

std::optional<std::string> subliminal_decode(ByteView uid,
                                             const crypto::UidPrivateKey& key);

struct UniformityReport {
  std::size_t samples = 0;
  double chi_squared = 0;
  int degrees_of_freedom = 255;
  double p_value = 1;
  double alpha = 0.01;
  bool flagged_nonrandom = false;  // p_value < alpha

  std::string to_json() const;
};

/// Byte-frequency chi-squared test over all bytes of the observed UIDs.
UniformityReport subliminal_detect(std::span<const Bytes> uids,
                                   double alpha = 0.01);

// ---------------------------------------------------------------------------
// Challenge semantics

/// Facts a terminal can pack into an AA challenge.
struct BorderEvent {
  Date date;
  int minute_of_day = 0;  // 0..1439
  std::uint16_t location = 0;

  bool operator==(const BorderEvent&) const = default;
};

/// days since epoch (u32) || minute (u16) || location (u16).
ByteArray<8> encode_challenge(const BorderEvent& event);
BorderEvent decode_challenge(const ByteArray<8>& challenge);

/// Chip-signed statement about a border crossing, checkable by anyone holding
/// the public LDS data and the document signer key.
struct Evidence {
  BorderEvent event;
  ByteArray<8> challenge{};
  Bytes signature;
  Bytes dg15;
  Bytes security_object;

  std::string to_json() const;
};

/// Signature valid under DG15 and challenge encodes `event`; with a trust
/// store, DG15 must also hash-match a security object from a trusted signer.
bool verify_evidence(const Evidence& evidence,
                     const chip::TrustStore* trust = nullptr);

struct ChallengeDemoOutcome {
  bool applicable = false;
  std::optional<Evidence> evidence;
  std::string reason;
};

ChallengeDemoOutcome challenge_semantics_demo(chip::ChipEndpoint& endpoint,
                                              const mrz::Mrz& mrz,
                                              const BorderEvent& event,
                                              const chip::TrustStore& trust,
                                              Rng rng);

}  // namespace epass::attacks
