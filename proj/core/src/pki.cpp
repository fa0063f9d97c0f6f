// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "epass/pki.hpp"

#include <algorithm>
#include <cstdio>

namespace epass::pki {

namespace {

constexpr std::string_view kMagic = "CVC1";
constexpr std::size_t kDateLength = 8;

enum Tag : std::uint8_t {
  kSubjectId = 1,
  kSubjectPublic = 2,
  kIssuerId = 3,
  kRole = 4,
  kRights = 5,
  kEffective = 6,
  kExpiry = 7,
  kSignature = 8,
};

void put_field(Bytes& out, Tag tag, ByteView value) {
  if (value.size() > 0xffff) throw InvalidInput("certificate field too long");
  out.push_back(tag);
  append_u16(out, static_cast<std::uint16_t>(value.size()));
  append(out, value);
}

std::string date_text(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d%02u%02u", d.year(), d.month(), d.day());
  return buf;
}

Date parse_date_text(ByteView v) {
  if (v.size() != kDateLength) throw ProtocolError("certificate date length");
  std::string s(v.begin(), v.end());
  std::string iso = s.substr(0, 4) + "-" + s.substr(4, 2) + "-" + s.substr(6, 2);
  try {
    Date d = Date::parse_iso(iso);
    if (date_text(d) != s) throw ProtocolError("certificate date not canonical");
    return d;
  } catch (const InvalidInput&) {
    throw ProtocolError("certificate date is invalid");
  }
}

ByteView expect_field(ByteReader& r, Tag tag) {
  if (r.u8() != tag) throw ProtocolError("certificate field out of order");
  return r.take_prefixed();
}

std::string text_of(ByteView v) {
  if (v.empty()) throw ProtocolError("certificate identifier is empty");
  for (auto c : v)
    if (c < 0x20 || c > 0x7e) throw ProtocolError("certificate id not ASCII");
  return std::string(v.begin(), v.end());
}

Role role_of(std::uint8_t v) {
  if (v < 1 || v > 4) throw ProtocolError("certificate role is invalid");
  return static_cast<Role>(v);
}

ChainVerdict reject(std::string reason) {
  ChainVerdict v;
  v.reason = std::move(reason);
  return v;
}

bool window_ok(const CvCertificate& c, Date as_of, WindowCheck window) {
  if (c.expiry_date < as_of) return false;
  return window == WindowCheck::kExpiryOnly || c.effective_date <= as_of;
}

}  // namespace

std::string_view to_string(Role r) {
  switch (r) {
    case Role::kCvcaRoot:
      return "cvca-root";
    case Role::kDocumentVerifier:
      return "dv";
    case Role::kInspectionSystem:
      return "is";
    case Role::kApplicationAuthority:
      return "application-authority";
  }
  return "?";
}

Role parse_role(std::string_view s) {
  for (Role r : {Role::kCvcaRoot, Role::kDocumentVerifier,
                 Role::kInspectionSystem, Role::kApplicationAuthority})
    if (to_string(r) == s) return r;
  throw InvalidInput("role: unknown role '" + std::string(s) + "'");
}

Bytes CvCertificate::tbs() const {
  Bytes out(kMagic.begin(), kMagic.end());
  put_field(out, kSubjectId, as_bytes(subject_id));
  put_field(out, kSubjectPublic, subject_public);
  put_field(out, kIssuerId, as_bytes(issuer_id));
  std::uint8_t role_byte = static_cast<std::uint8_t>(role);
  put_field(out, kRole, ByteView(&role_byte, 1));
  Bytes rights_bytes;
  encode_dg_set(rights_bytes, rights);
  put_field(out, kRights, rights_bytes);
  put_field(out, kEffective, as_bytes(date_text(effective_date)));
  put_field(out, kExpiry, as_bytes(date_text(expiry_date)));
  return out;
}

Bytes CvCertificate::encode() const {
  Bytes out = tbs();
  put_field(out, kSignature, signature);
  return out;
}

CvCertificate CvCertificate::decode(ByteView data) {
  ByteReader r(data);
  if (!equal_bytes(r.take(kMagic.size()), as_bytes(kMagic)))
    throw ProtocolError("not a card-verifiable certificate");
  CvCertificate c;
  c.subject_id = text_of(expect_field(r, kSubjectId));
  auto pub = expect_field(r, kSubjectPublic);
  if (pub.size() != c.subject_public.size())
    throw ProtocolError("certificate public key length");
  std::copy(pub.begin(), pub.end(), c.subject_public.begin());
  c.issuer_id = text_of(expect_field(r, kIssuerId));
  auto role = expect_field(r, kRole);
  if (role.size() != 1) throw ProtocolError("certificate role length");
  c.role = role_of(role[0]);
  ByteReader rights(expect_field(r, kRights));
  c.rights = decode_dg_set(rights);
  rights.expect_end();
  c.effective_date = parse_date_text(expect_field(r, kEffective));
  c.expiry_date = parse_date_text(expect_field(r, kExpiry));
  auto sig = expect_field(r, kSignature);
  if (sig.size() != crypto::kSignatureSize)
    throw ProtocolError("certificate signature length");
  c.signature.assign(sig.begin(), sig.end());
  r.expect_end();
  return c;
}

Issuer Issuer::from_certificate(const CvCertificate& cert,
                                const crypto::SignatureKeyPair& key) {
  return {cert.subject_id, key, cert.role, cert.rights};
}

bool role_may_issue(Role issuer, Role subject) {
  switch (issuer) {
    case Role::kCvcaRoot:
      return subject == Role::kDocumentVerifier ||
             subject == Role::kApplicationAuthority;
    case Role::kDocumentVerifier:
      return subject == Role::kInspectionSystem;
    default:
      return false;
  }
}

CvCertificate issue(const Issuer& issuer, std::string subject_id,
                    const crypto::VerifyKey& subject_public, Role role,
                    DgSet rights, Date effective_date, Date expiry_date) {
  if (!role_may_issue(issuer.role, role))
    throw InvalidInput(std::string("role: ") +
                       std::string(to_string(issuer.role)) + " may not issue " +
                       std::string(to_string(role)));
  if (issuer.role != Role::kCvcaRoot && !is_subset(rights, issuer.rights))
    throw InvalidInput("rights: escalation beyond the issuer's rights " +
                       format_dg_set(issuer.rights));
  if (expiry_date < effective_date)
    throw InvalidInput("expiry_date: before effective_date");
  for (int dg : rights)
    if (!is_valid_dg(dg)) throw InvalidInput("rights: data group out of range");

  CvCertificate c;
  c.subject_id = std::move(subject_id);
  c.subject_public = subject_public;
  c.issuer_id = issuer.id;
  c.role = role;
  c.rights = std::move(rights);
  c.effective_date = effective_date;
  c.expiry_date = expiry_date;
  c.signature = crypto::sign(issuer.key, c.tbs());
  return c;
}

CvCertificate issue_root(const Issuer& root, Date effective_date,
                         Date expiry_date) {
  if (root.role != Role::kCvcaRoot)
    throw InvalidInput("role: only a root may self-sign");
  if (expiry_date < effective_date)
    throw InvalidInput("expiry_date: before effective_date");
  CvCertificate c;
  c.subject_id = root.id;
  c.subject_public = root.key.public_key;
  c.issuer_id = root.id;
  c.role = Role::kCvcaRoot;
  for (int dg = 1; dg <= 16; ++dg) c.rights.insert(dg);
  c.effective_date = effective_date;
  c.expiry_date = expiry_date;
  c.signature = crypto::sign(root.key, c.tbs());
  return c;
}

bool verify_certificate(const CvCertificate& cert, ByteView issuer_key,
                        Date as_of, WindowCheck window) {
  return cert.effective_date <= cert.expiry_date &&
         crypto::verify(issuer_key, cert.tbs(), cert.signature) &&
         window_ok(cert, as_of, window);
}

ChainVerdict verify_chain(std::span<const CvCertificate> chain,
                          ByteView trusted_root_key, Date as_of,
                          WindowCheck window) {
  if (chain.empty()) return reject("empty chain");
  const CvCertificate& root = chain.front();
  if (root.role != Role::kCvcaRoot || root.issuer_id != root.subject_id)
    return reject("chain does not start with a self-signed root");
  if (!equal_bytes(root.subject_public, trusted_root_key))
    return reject("unknown root");

  ChainVerdict v;
  v.rights = root.rights;
  v.max_effective_date = root.effective_date;
  const CvCertificate* parent = &root;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const CvCertificate& c = chain[i];
    if (i > 0) {
      if (c.issuer_id != parent->subject_id)
        return reject("link " + std::to_string(i) + ": issuer mismatch");
      if (!role_may_issue(parent->role, c.role))
        return reject("link " + std::to_string(i) + ": forbidden role");
    }
    if (c.effective_date > c.expiry_date)
      return reject("link " + std::to_string(i) + ": inverted validity");
    if (!crypto::verify(parent->subject_public, c.tbs(), c.signature))
      return reject("link " + std::to_string(i) + ": bad signature");
    if (c.expiry_date < as_of)
      return reject("link " + std::to_string(i) + ": expired");
    if (window == WindowCheck::kFull && as_of < c.effective_date)
      return reject("link " + std::to_string(i) + ": not yet valid");
    v.rights = intersect(v.rights, c.rights);
    v.max_effective_date = std::max(v.max_effective_date, c.effective_date);
    parent = &c;
  }
  v.ok = true;
  return v;
}

CountryPki CountryPki::generate(std::string country, Rng& rng) {
  CountryPki p;
  p.country = std::move(country);
  p.document_signer = crypto::signature_keygen(rng);
  p.cvca = crypto::signature_keygen(rng);
  p.backoffice = crypto::signature_keygen(rng);
  return p;
}

Issuer CountryPki::cvca_issuer() const {
  return {cvca_id(), cvca, Role::kCvcaRoot, {}};
}

}  // namespace epass::pki
