// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "epass/backoffice.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <mutex>

namespace epass::backoffice {

namespace {

constexpr std::string_view kGrantMagic = "GRANT1";

crypto::VerifyKey key_from_hex(const std::string& hex, const char* field) {
  Bytes b;
  try {
    b = from_hex(hex);
  } catch (const InvalidInput&) {
    throw InvalidInput(std::string(field) + ": not hex");
  }
  if (b.size() != crypto::kVerifyKeySize)
    throw InvalidInput(std::string(field) + ": must be 32 bytes");
  crypto::VerifyKey k{};
  std::copy(b.begin(), b.end(), k.begin());
  return k;
}

}  // namespace

Bytes GrantRequest::encode() const {
  Bytes out(nonce.begin(), nonce.end());
  Bytes cert = c_aa.encode();
  append_u16(out, static_cast<std::uint16_t>(cert.size()));
  append(out, cert);
  append(out, k_ta);
  return out;
}

GrantRequest GrantRequest::decode(ByteView data) {
  ByteReader r(data);
  GrantRequest req;
  auto n = r.take(kNonceSize);
  std::copy(n.begin(), n.end(), req.nonce.begin());
  req.c_aa = pki::CvCertificate::decode(r.take_prefixed());
  auto k = r.take(crypto::kVerifyKeySize);
  std::copy(k.begin(), k.end(), req.k_ta.begin());
  r.expect_end();
  if (req.k_ta != req.c_aa.subject_public)
    throw ProtocolError("K_TA does not match the C_AA subject key");
  return req;
}

Bytes Grant::tbs() const {
  Bytes out(kGrantMagic.begin(), kGrantMagic.end());
  append(out, nonce);
  encode_dg_set(out, rights);
  append_u64(out, static_cast<std::uint64_t>(issued_at));
  return out;
}

Bytes Grant::encode() const {
  Bytes out = tbs();
  append(out, signature);
  return out;
}

Grant Grant::decode(ByteView data) {
  ByteReader r(data);
  if (!equal_bytes(r.take(kGrantMagic.size()), as_bytes(kGrantMagic)))
    throw ProtocolError("not a grant");
  Grant g;
  auto n = r.take(kNonceSize);
  std::copy(n.begin(), n.end(), g.nonce.begin());
  g.rights = decode_dg_set(r);
  g.issued_at = static_cast<std::int64_t>(r.u64());
  auto sig = r.take(crypto::kSignatureSize);
  g.signature.assign(sig.begin(), sig.end());
  r.expect_end();
  return g;
}

bool Grant::verify(ByteView backoffice_key) const {
  return crypto::verify(backoffice_key, tbs(), signature);
}

Backoffice::Backoffice(crypto::SignatureKeyPair signing_key,
                       const SimClock& clock)
    : signing_key_(signing_key),
      clock_(clock),
      registry_(std::make_shared<RegistrySnapshot>()) {}

void Backoffice::register_authority(const std::string& id,
                                    const crypto::VerifyKey& key,
                                    DgSet rights) {
  for (int dg : rights)
    if (!is_valid_dg(dg)) throw InvalidInput("rights: data group out of range");
  std::unique_lock lock(mutex_);
  auto next = std::make_shared<RegistrySnapshot>(*registry_);
  next->authorities[id] = {id, key, std::move(rights)};
  registry_ = std::move(next);
}

void Backoffice::revoke_terminal(const crypto::VerifyKey& k_ta) {
  std::unique_lock lock(mutex_);
  auto next = std::make_shared<RegistrySnapshot>(*registry_);
  next->revoked.insert(k_ta);
  registry_ = std::move(next);
}

void Backoffice::reinstate_terminal(const crypto::VerifyKey& k_ta) {
  std::unique_lock lock(mutex_);
  auto next = std::make_shared<RegistrySnapshot>(*registry_);
  next->revoked.erase(k_ta);
  registry_ = std::move(next);
}

RegistrySnapshot Backoffice::snapshot() const {
  std::shared_lock lock(mutex_);
  return *registry_;
}

void Backoffice::restore(RegistrySnapshot snapshot) {
  std::unique_lock lock(mutex_);
  registry_ = std::make_shared<RegistrySnapshot>(std::move(snapshot));
}

Grant Backoffice::authorize(const GrantRequest& request) const {
  std::shared_ptr<const RegistrySnapshot> registry;
  {
    std::shared_lock lock(mutex_);
    registry = registry_;
  }

  Grant g;
  g.nonce = request.nonce;
  g.issued_at = clock_.unix_seconds();

  const auto& c_aa = request.c_aa;
  auto authority = registry->authorities.find(c_aa.issuer_id);
  bool recognised =
      authority != registry->authorities.end() &&
      c_aa.role == pki::Role::kApplicationAuthority &&
      c_aa.subject_public == request.k_ta &&
      pki::verify_certificate(c_aa, authority->second.key, clock_.today());
  if (recognised && !registry->revoked.contains(request.k_ta))
    g.rights = authority->second.rights;

  g.signature = crypto::sign(signing_key_, g.tbs());
  return g;
}

Bytes Backoffice::authorize_wire(ByteView request) const {
  return authorize(GrantRequest::decode(request)).encode();
}

std::string registry_to_json(const RegistrySnapshot& snapshot) {
  nlohmann::ordered_json j;
  j["authorities"] = nlohmann::ordered_json::array();
  for (const auto& [id, a] : snapshot.authorities)
    j["authorities"].push_back(
        {{"id", id}, {"public_key", to_hex(a.key)}, {"rights", a.rights}});
  j["revoked"] = nlohmann::ordered_json::array();
  for (const auto& k : snapshot.revoked) j["revoked"].push_back(to_hex(k));
  return j.dump(2) + "\n";
}

RegistrySnapshot registry_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception&) {
    throw InvalidInput("registry: not valid JSON");
  }
  RegistrySnapshot s;
  try {
    for (const auto& a : j.value("authorities", nlohmann::json::array())) {
      Authority auth;
      auth.id = a.at("id").get<std::string>();
      auth.key = key_from_hex(a.at("public_key").get<std::string>(),
                              "authorities.public_key");
      for (int dg : a.at("rights").get<std::vector<int>>()) {
        if (!is_valid_dg(dg))
          throw InvalidInput("authorities.rights: data group out of range");
        auth.rights.insert(dg);
      }
      s.authorities[auth.id] = auth;
    }
    for (const auto& k : j.value("revoked", nlohmann::json::array()))
      s.revoked.insert(key_from_hex(k.get<std::string>(), "revoked"));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("registry: ") + e.what());
  }
  return s;
}

}  // namespace epass::backoffice
