// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "epass/apdu.hpp"
#include "epass/backoffice.hpp"
#include "epass/crypto.hpp"
#include "epass/dh.hpp"
#include "epass/lds.hpp"
#include "epass/mrz.hpp"
#include "epass/pki.hpp"
#include "epass/rng.hpp"
#include "epass/sim_clock.hpp"
#include "epass/uid_cipher.hpp"

namespace epass::chip {

using Millis = std::chrono::milliseconds;

/// Supplier-specific behavior: ATR bytes, answers to unexpected input and
/// simulated response times. Two chips with equal profiles are
/// indistinguishable before BAC (apart from the UID policy).
struct ChipProfile {
  std::string name = "vendor-a";
  Bytes atr;
  std::uint16_t sw_unknown_ins = apdu::kSwInsNotSupported;
  std::uint16_t sw_wrong_class = apdu::kSwClassNotSupported;
  std::uint16_t sw_select_unknown = apdu::kSwFileNotFound;
  std::uint16_t sw_read_unprotected = apdu::kSwSecurityNotSatisfied;
  std::uint16_t sw_malformed = apdu::kSwWrongLength;
  Millis select_time{4};
  Millis challenge_time{6};
  Millis auth_time{30};
  Millis sm_time{12};
  Millis error_time{2};
  bool supports_eke = false;

  /// Built-in profiles: "vendor-a", "vendor-b". Throws InvalidInput.
  static ChipProfile named(std::string_view name);
  bool operator==(const ChipProfile&) const = default;
};

struct UidPolicy {
  enum class Kind { kFixed, kRandom, kSubliminal };
  Kind kind = Kind::kRandom;
  Bytes fixed_uid;                      // kFixed
  crypto::UidPublicKey subliminal_key;  // kSubliminal

  static UidPolicy fixed(Bytes uid) { return {Kind::kFixed, std::move(uid), {}}; }
  static UidPolicy random() { return {}; }
  static UidPolicy subliminal(crypto::UidPublicKey key) {
    return {Kind::kSubliminal, {}, key};
  }
};

std::string_view to_string(UidPolicy::Kind k);

/// Private keys and trust anchors loaded at personalization. Absent keys
/// model chips without AA / chip authentication / on-line TA.
struct ChipKeys {
  std::optional<crypto::SignatureKeyPair> active_auth;
  std::optional<crypto::DhKeyPair> chip_auth;
  std::optional<crypto::VerifyKey> cvca_public;
  std::optional<crypto::VerifyKey> backoffice_public;
};

struct Personalization {
  mrz::Mrz mrz;
  LogicalDataStructure lds;
  ChipKeys keys;
  UidPolicy uid_policy;
  ChipProfile profile;
  std::string country;
  Date current_date;  // date the chip's clock starts at

  /// Same LDS and public data, no private keys: what a cloner can copy.
  Personalization clone_without_keys() const;
};

/// Inputs for creating a genuine passport.
struct PassportSpec {
  mrz::Mrz mrz;
  Bytes face_image;
  Bytes fingerprints;
  bool with_active_auth = true;
  bool with_chip_auth = true;
  UidPolicy uid_policy;
  ChipProfile profile;
  Date issue_date;
};

/// DG1 = MRZ text, DG2 = face, DG3 = fingerprints, DG14 = chip-auth public
/// key, DG15 = AA public key; SO_D signed by the country's document signer.
Personalization personalize(const PassportSpec& spec,
                            const pki::CountryPki& country, Rng& rng);

/// Bytes the terminal signs to prove possession of its IS key.
Bytes terminal_auth_message(ByteView challenge, ByteView ephemeral_public);
/// Bytes the terminal signs to prove possession of K_TA.
Bytes online_ta_message(ByteView challenge, ByteView c_aa_encoding);

enum class ChipPhase { kIdle, kBacChallenged, kSecure, kEacAuthenticated };
std::string_view to_string(ChipPhase p);

struct ChipState {
  ChipPhase phase = ChipPhase::kIdle;
  std::optional<crypto::SessionKeys> session;
  Date current_date;
  DgSet granted_rights;
  bool chip_authenticated = false;
};

struct PowerOn {
  Bytes uid;
  Bytes atr;
};

/// Anything a terminal can talk to: a genuine chip, a clone, a relay.
class ChipEndpoint {
 public:
  virtual ~ChipEndpoint() = default;
  virtual PowerOn power_on() = 0;
  /// One command frame in, one response frame (data || SW) out.
  virtual Bytes transmit(ByteView frame) = 0;
};

struct ThrottlePolicy {
  Millis base{500};
  Millis cap{8000};
};

/// The passport chip. Processes one command at a time; one instance serves
/// one session at a time.
class Chip : public ChipEndpoint {
 public:
  Chip(Personalization personalization, Rng rng, SimClock& clock,
       ThrottlePolicy throttle = {});

  PowerOn power_on() override;
  Bytes transmit(ByteView frame) override;

  /// BAC step 1: fresh 8-byte chip challenge.
  ByteArray<8> bac_step1();
  /// BAC step 2: terminal cryptogram in, chip cryptogram out; nullopt on
  /// failure (failure counter incremented, delay charged to the clock).
  std::optional<Bytes> bac_step2(ByteView cryptogram);
  /// Unwraps one protected frame, executes it, wraps the answer. Any
  /// secure-messaging error aborts the session.
  apdu::Response sm_dispatch(ByteView sm_frame);

  const ChipState& state() const { return state_; }
  const Personalization& personalization() const { return perso_; }
  unsigned consecutive_failures() const { return failures_; }
  Millis imposed_delay() const { return imposed_delay_; }
  void set_online_ta_timeout(Millis t) { ota_timeout_ = t; }

 private:
  apdu::Response dispatch_inner(const apdu::Command& cmd);
  apdu::Response read_data_group(int dg);
  apdu::Response active_authenticate(ByteView challenge);
  apdu::Response chip_authenticate(ByteView terminal_public,
                                   std::optional<crypto::SessionKeys>& rekey);
  apdu::Response ta_verify_certificate(ByteView cert);
  apdu::Response ta_get_challenge();
  apdu::Response ta_external_authenticate(ByteView signature);
  apdu::Response ota_begin(ByteView c_aa);
  apdu::Response ota_prove(ByteView signature);
  apdu::Response ota_complete(ByteView grant);
  apdu::Response eke_authenticate(ByteView message);

  void reset_session();
  void abort_session();
  void charge(Millis t);

  Personalization perso_;
  Rng rng_;
  SimClock& clock_;
  ThrottlePolicy throttle_;
  ChipState state_;
  crypto::DerivedKeys bac_keys_;
  crypto::Key16 password_key_{};

  ByteArray<8> rnd_icc_{};
  unsigned failures_ = 0;
  Millis imposed_delay_{0};

  Bytes terminal_ephemeral_;
  std::vector<pki::CvCertificate> ta_chain_;
  std::optional<ByteArray<8>> ta_challenge_;

  std::optional<pki::CvCertificate> ota_cert_;
  std::optional<ByteArray<16>> ota_challenge_;
  std::optional<backoffice::Nonce> ota_nonce_;
  SimClock::Duration ota_issued_{0};
  Millis ota_timeout_{30000};
};

}  // namespace epass::chip
