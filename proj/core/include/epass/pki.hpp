// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epass/data_groups.hpp"
#include "epass/date.hpp"
#include "epass/signature.hpp"

namespace epass::pki {

/// Position in the hierarchy. Allowed issuance: root -> root (self-signed),
/// root -> document verifier -> inspection system, and
/// root -> application authority (the certificate a terminal presents for
/// on-line terminal authentication).
enum class Role : std::uint8_t {
  kCvcaRoot = 1,
  kDocumentVerifier = 2,
  kInspectionSystem = 3,
  kApplicationAuthority = 4,
};

std::string_view to_string(Role r);
Role parse_role(std::string_view s);

/// Card-verifiable certificate.
///
/// Canonical encoding: "CVC1" followed by TLV fields (tag u8, length u16,
/// value) in ascending tag order, each present exactly once:
///   01 subject_id   02 subject_public (32)   03 issuer_id   04 role (1)
///   05 rights (count, ascending ids)   06 effective_date   07 expiry_date
///   08 signature (64, omitted from the signed body)
/// Dates are 8 ASCII digits YYYYMMDD.
struct CvCertificate {
  std::string subject_id;
  crypto::VerifyKey subject_public{};
  std::string issuer_id;
  Role role = Role::kCvcaRoot;
  DgSet rights;
  Date effective_date;
  Date expiry_date;
  Bytes signature;

  /// The signed body (everything but the signature field).
  Bytes tbs() const;
  Bytes encode() const;
  /// Strict decoder; throws ProtocolError on any deviation from the layout.
  static CvCertificate decode(ByteView data);

  bool operator==(const CvCertificate&) const = default;
};

/// Key and own certificate data of an issuing authority.
struct Issuer {
  std::string id;
  crypto::SignatureKeyPair key;
  Role role = Role::kCvcaRoot;
  DgSet rights;  // ignored for roots

  /// Issuer view of a certificate holder.
  static Issuer from_certificate(const CvCertificate& cert,
                                 const crypto::SignatureKeyPair& key);
};

bool role_may_issue(Role issuer, Role subject);

/// Throws InvalidInput on a forbidden role transition, a rights escalation
/// or an inverted validity window.
CvCertificate issue(const Issuer& issuer, std::string subject_id,
                    const crypto::VerifyKey& subject_public, Role role,
                    DgSet rights, Date effective_date, Date expiry_date);

/// Self-signed root certificate.
CvCertificate issue_root(const Issuer& root, Date effective_date,
                         Date expiry_date);

enum class WindowCheck {
  kFull,        // effective_date <= as_of <= expiry_date
  kExpiryOnly,  // as_of <= expiry_date; used by chips without a clock
};

struct ChainVerdict {
  bool ok = false;
  DgSet rights;
  std::string reason;
  Date max_effective_date;
};

/// Validates a root-first chain against a trusted root key as of a date.
/// Rights are the intersection along the chain.
ChainVerdict verify_chain(std::span<const CvCertificate> chain,
                          ByteView trusted_root_key, Date as_of,
                          WindowCheck window = WindowCheck::kFull);

/// Single-link check: signature under `issuer_key` and validity window.
bool verify_certificate(const CvCertificate& cert, ByteView issuer_key,
                        Date as_of, WindowCheck window = WindowCheck::kFull);

/// Key material of an issuing country: document signer for passive
/// authentication, country root for EAC, and the back-office grant key.
struct CountryPki {
  std::string country;
  crypto::SignatureKeyPair document_signer;
  crypto::SignatureKeyPair cvca;
  crypto::SignatureKeyPair backoffice;

  static CountryPki generate(std::string country, Rng& rng);
  std::string document_signer_id() const { return country + "-DS"; }
  std::string cvca_id() const { return country + "-CVCA"; }
  Issuer cvca_issuer() const;
};

}  // namespace epass::pki
