// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "epass/backoffice.hpp"
#include "epass/chip.hpp"
#include "epass/transcript.hpp"

namespace epass::terminal {

/// Produces the 8-byte AA challenge. Unset means uniformly random.
using ChallengeSource = std::function<ByteArray<8>()>;

struct TerminalConfig {
  chip::TrustStore document_signers;
  ChallengeSource aa_challenge;
};

struct Failure {
  std::string check;
  std::string reason;
  bool operator==(const Failure&) const = default;
};

struct InspectionReport {
  bool bac_ok = false;
  bool pa_ok = false;
  bool aa_ok = false;
  bool chip_auth_ok = false;
  bool ta_ok = false;
  DgSet dgs_read;
  DgSet rights;
  std::map<int, Bytes> data_groups;  // contents of dgs_read
  std::vector<Failure> failures;
  Transcript transcript;

  /// Summary without DG contents; the transcript is written separately.
  std::string to_json() const;
};

struct TerminalAuthCredentials {
  std::vector<pki::CvCertificate> chain;  // root first, IS certificate last
  crypto::SignatureKeyPair leaf_key;
};

struct OnlineTaCredentials {
  pki::CvCertificate c_aa;
  crypto::SignatureKeyPair k_ta;
  backoffice::GrantService* service = nullptr;
};

struct InspectionOptions {
  bool use_eke = false;
  bool active_auth = true;
  bool chip_auth = true;
  std::optional<TerminalAuthCredentials> terminal_auth;
  std::optional<OnlineTaCredentials> online_ta;
};

/// Session keys in force from transcript entry `first_seq` onwards.
struct KeyEpoch {
  std::size_t first_seq = 0;
  crypto::SessionKeys keys;
};

/// A plaintext the terminal sent or acted on, tied to the transcript entry
/// that carried it.
struct PlaintextRecord {
  std::size_t seq = 0;
  Bytes plaintext;
  bool operator==(const PlaintextRecord&) const = default;
};

/// Challenge and chip signature of the most recent active authentication.
struct AaExchange {
  ByteArray<8> challenge{};
  Bytes signature;
};

/// Inspection system. One instance drives one session at a time.
class Terminal {
 public:
  Terminal(TerminalConfig config, Rng rng);

  /// Powers the chip and records UID and ATR.
  chip::PowerOn power_on(chip::ChipEndpoint& endpoint);

  /// Mutual BAC. Retries once, and only when the failure was not an
  /// authentication rejection.
  bool run_bac(chip::ChipEndpoint& endpoint, const mrz::MrzInfo& info);
  bool run_bac(chip::ChipEndpoint& endpoint, const mrz::Mrz& mrz) {
    return run_bac(endpoint, mrz::mrz_info(mrz));
  }
  /// Password-authenticated variant keyed by the same MRZ seed.
  bool run_eke(chip::ChipEndpoint& endpoint, const mrz::MrzInfo& info);

  /// Reads one data group (0 = security object) over secure messaging.
  std::optional<Bytes> read_dg(int dg);
  /// Reads the security object and every non-sensitive DG it lists.
  void read_lds();
  bool verify_pa();
  bool verify_aa();
  bool run_chip_auth();
  DgSet run_terminal_auth(const TerminalAuthCredentials& creds);
  DgSet run_online_ta(const OnlineTaCredentials& creds);
  /// Reads the sensitive DGs covered by the current rights.
  void read_granted();

  /// Full flow: power on, BAC or EKE, LDS, PA, then the optional checks.
  InspectionReport inspect(chip::ChipEndpoint& endpoint, const mrz::Mrz& mrz,
                           const InspectionOptions& options = {});

  const InspectionReport& report() const { return report_; }
  const Transcript& transcript() const { return report_.transcript; }
  bool has_session() const { return session_.has_value(); }
  const std::vector<PlaintextRecord>& plaintext_log() const { return plaintexts_; }
  const std::vector<KeyEpoch>& key_epochs() const { return epochs_; }
  const std::optional<chip::SecurityObject>& security_object() const {
    return sod_;
  }
  const std::optional<AaExchange>& last_aa() const { return last_aa_; }

  /// Starts a fresh report and transcript.
  void reset();

 private:
  apdu::Response exchange(Phase phase, const apdu::Command& cmd);
  apdu::Response secure(Phase phase, const apdu::Command& inner);
  bool bac_attempt(const crypto::DerivedKeys& keys, bool& rejected);
  void fail(std::string check, std::string reason);
  void record(Direction d, Phase p, ByteView payload);

  TerminalConfig config_;
  Rng rng_;
  chip::ChipEndpoint* endpoint_ = nullptr;
  std::optional<crypto::SessionKeys> session_;
  std::optional<chip::SecurityObject> sod_;
  Bytes ephemeral_public_;
  std::optional<AaExchange> last_aa_;
  InspectionReport report_;
  std::vector<PlaintextRecord> plaintexts_;
  std::vector<KeyEpoch> epochs_;
};

/// Decrypts every secure-messaging frame of `transcript` with the given key
/// schedule, in transcript order. Throws IntegrityError if a frame does not
/// verify.
std::vector<PlaintextRecord> decrypt_transcript(const Transcript& transcript,
                                                std::span<const KeyEpoch> epochs);

}  // namespace epass::terminal
