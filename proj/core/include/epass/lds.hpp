// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>

#include "epass/crypto.hpp"
#include "epass/data_groups.hpp"
#include "epass/signature.hpp"

namespace epass::chip {

/// Hash of every present data group, signed by the country's document
/// signer. Encoding of the signed body:
///   "SOD1" || u16-prefixed signer_id || count(1) || (dg(1) || hash(32))*
/// with data groups ascending; the full encoding appends the 64-byte
/// signature.
struct SecurityObject {
  std::string signer_id;
  std::map<int, crypto::Digest> hashes;
  Bytes signature;

  Bytes tbs() const;
  Bytes encode() const;
  static SecurityObject decode(ByteView data);

  bool operator==(const SecurityObject&) const = default;
};

struct LogicalDataStructure {
  std::map<int, Bytes> data_groups;
  SecurityObject security_object;

  bool operator==(const LogicalDataStructure&) const = default;
};

/// Hashes and signs the given data groups.
LogicalDataStructure build_lds(std::map<int, Bytes> data_groups,
                               std::string signer_id,
                               const crypto::SignatureKeyPair& document_signer);

/// Document signer keys an inspection system trusts, by signer id.
using TrustStore = std::map<std::string, crypto::VerifyKey>;

struct PassiveVerdict {
  bool ok = false;
  std::string reason;
};

/// Every data group read must hash-match the security object and the
/// security object must verify under a trusted document signer.
PassiveVerdict verify_passive(const SecurityObject& sod,
                              const std::map<int, Bytes>& data_groups_read,
                              const TrustStore& trust);

}  // namespace epass::chip
