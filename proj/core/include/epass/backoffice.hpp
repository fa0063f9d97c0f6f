// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>

#include "epass/data_groups.hpp"
#include "epass/pki.hpp"
#include "epass/sim_clock.hpp"

namespace epass::backoffice {

inline constexpr std::size_t kNonceSize = 16;
using Nonce = ByteArray<kNonceSize>;

/// What the chip relays: its fresh nonce, the terminal's application
/// certificate C_AA and the terminal key K_TA (= C_AA.subject_public).
/// Wire: nonce(16) || u16-prefixed C_AA encoding || k_ta(32).
struct GrantRequest {
  Nonce nonce{};
  pki::CvCertificate c_aa;
  crypto::VerifyKey k_ta{};

  Bytes encode() const;
  /// Throws ProtocolError on a malformed frame or k_ta != C_AA key.
  static GrantRequest decode(ByteView data);
};

/// Signed answer of the back office. Rights may be empty.
/// Signed body: "GRANT1" || nonce(16) || rights || issued_at(i64);
/// wire = body || signature(64).
struct Grant {
  Nonce nonce{};
  DgSet rights;
  std::int64_t issued_at = 0;  // unix seconds
  Bytes signature;

  Bytes tbs() const;
  Bytes encode() const;
  static Grant decode(ByteView data);
  bool verify(ByteView backoffice_key) const;
};

/// Channel from the chip (via the terminal) to the issuing country's back
/// office. nullopt models a relay timeout.
class GrantService {
 public:
  virtual ~GrantService() = default;
  virtual std::optional<Bytes> relay(ByteView request) = 0;
};

struct Authority {
  std::string id;
  crypto::VerifyKey key{};
  DgSet rights;

  bool operator==(const Authority&) const = default;
};

/// Registry contents at one instant.
struct RegistrySnapshot {
  std::map<std::string, Authority> authorities;
  std::set<crypto::VerifyKey> revoked;
};

/// On-line authorization service. authorize() may run concurrently with
/// itself and with administrative updates; every call sees one consistent
/// registry snapshot and every update is visible to calls that start after
/// it returns.
class Backoffice : public GrantService {
 public:
  Backoffice(crypto::SignatureKeyPair signing_key, const SimClock& clock);

  /// Idempotent; re-registering replaces key and rights.
  void register_authority(const std::string& id, const crypto::VerifyKey& key,
                          DgSet rights);
  void revoke_terminal(const crypto::VerifyKey& k_ta);
  void reinstate_terminal(const crypto::VerifyKey& k_ta);

  RegistrySnapshot snapshot() const;
  void restore(RegistrySnapshot snapshot);

  /// Always returns a signed grant echoing the nonce; rights are empty
  /// unless C_AA verifies against a registered authority and K_TA is not
  /// revoked.
  Grant authorize(const GrantRequest& request) const;
  /// Wire form; throws ProtocolError on a malformed request.
  Bytes authorize_wire(ByteView request) const;

  std::optional<Bytes> relay(ByteView request) override {
    return authorize_wire(request);
  }

  const crypto::VerifyKey& public_key() const {
    return signing_key_.public_key;
  }

 private:
  crypto::SignatureKeyPair signing_key_;
  const SimClock& clock_;
  mutable std::shared_mutex mutex_;
  std::shared_ptr<const RegistrySnapshot> registry_;
};

std::string registry_to_json(const RegistrySnapshot& snapshot);
/// Throws InvalidInput naming the offending field.
RegistrySnapshot registry_from_json(std::string_view text);

}  // namespace epass::backoffice
