// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "epass/lds.hpp"

#include <algorithm>

namespace epass::chip {

namespace {
constexpr std::string_view kMagic = "SOD1";
}

Bytes SecurityObject::tbs() const {
  Bytes out(kMagic.begin(), kMagic.end());
  append_u16(out, static_cast<std::uint16_t>(signer_id.size()));
  append(out, as_bytes(signer_id));
  out.push_back(static_cast<std::uint8_t>(hashes.size()));
  for (const auto& [dg, hash] : hashes) {
    out.push_back(static_cast<std::uint8_t>(dg));
    append(out, hash);
  }
  return out;
}

Bytes SecurityObject::encode() const {
  Bytes out = tbs();
  append(out, signature);
  return out;
}

SecurityObject SecurityObject::decode(ByteView data) {
  ByteReader r(data);
  if (!equal_bytes(r.take(kMagic.size()), as_bytes(kMagic)))
    throw ProtocolError("not a security object");
  SecurityObject s;
  auto id = r.take_prefixed();
  s.signer_id.assign(id.begin(), id.end());
  std::size_t n = r.u8();
  int previous = 0;
  for (std::size_t i = 0; i < n; ++i) {
    int dg = r.u8();
    if (!is_valid_dg(dg) || dg <= previous)
      throw ProtocolError("security object is not canonical");
    previous = dg;
    auto h = r.take(32);
    std::copy(h.begin(), h.end(), s.hashes[dg].begin());
  }
  auto sig = r.take(crypto::kSignatureSize);
  s.signature.assign(sig.begin(), sig.end());
  r.expect_end();
  return s;
}

LogicalDataStructure build_lds(std::map<int, Bytes> data_groups,
                               std::string signer_id,
                               const crypto::SignatureKeyPair& document_signer) {
  LogicalDataStructure lds;
  lds.security_object.signer_id = std::move(signer_id);
  for (const auto& [dg, bytes] : data_groups) {
    if (!is_valid_dg(dg)) throw InvalidInput("data_groups: id out of range");
    lds.security_object.hashes[dg] = crypto::sha256(bytes);
  }
  lds.data_groups = std::move(data_groups);
  lds.security_object.signature =
      crypto::sign(document_signer, lds.security_object.tbs());
  return lds;
}

PassiveVerdict verify_passive(const SecurityObject& sod,
                              const std::map<int, Bytes>& data_groups_read,
                              const TrustStore& trust) {
  auto signer = trust.find(sod.signer_id);
  if (signer == trust.end() ||
      !crypto::verify(signer->second, sod.tbs(), sod.signature))
    return {false, "unknown signer"};
  for (const auto& [dg, bytes] : data_groups_read) {
    auto h = sod.hashes.find(dg);
    if (h == sod.hashes.end())
      return {false, "DG" + std::to_string(dg) + " not covered"};
    if (crypto::sha256(bytes) != h->second)
      return {false, "DG" + std::to_string(dg) + " hash mismatch"};
  }
  return {true, {}};
}

}  // namespace epass::chip
