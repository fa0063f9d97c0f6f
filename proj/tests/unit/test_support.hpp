// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <nlohmann/json.hpp>

#include <memory>
#include <string>

#include "epass/backoffice.hpp"
#include "epass/io.hpp"
#include "epass/scenarios.hpp"

namespace epass::testing {

inline nlohmann::json crypto_vectors() {
  return nlohmann::json::parse(io::read_file(EPASS_FIXTURE_DIR "/crypto_vectors.json"));
}

template <std::size_t N>
ByteArray<N> array_from_hex(const std::string& hex) {
  Bytes b = from_hex(hex);
  ByteArray<N> out{};
  std::copy(b.begin(), b.end(), out.begin());
  return out;
}

/// Certificates and keys for terminal authentication under `country`.
struct TaSetup {
  pki::CvCertificate root;
  pki::Issuer dv;
  pki::CvCertificate dv_cert;

  terminal::TerminalAuthCredentials terminal(Rng& rng, DgSet rights, Date from,
                                             Date to) const {
    auto key = crypto::signature_keygen(rng);
    auto cert = pki::issue(dv, "IS", key.public_key, pki::Role::kInspectionSystem,
                           std::move(rights), from, to);
    return {{root, dv_cert, cert}, key};
  }
};

inline TaSetup make_ta_setup(const pki::CountryPki& country, Rng& rng,
                             DgSet dv_rights = {kDgFingerprint, kDgIris}) {
  TaSetup s;
  auto cvca = country.cvca_issuer();
  s.root = pki::issue_root(cvca, Date::from_ymd(2020, 1, 1), Date::from_ymd(2035, 1, 1));
  s.dv = {"DV", crypto::signature_keygen(rng), pki::Role::kDocumentVerifier, dv_rights};
  s.dv_cert = pki::issue(cvca, s.dv.id, s.dv.key.public_key, s.dv.role, dv_rights,
                         Date::from_ymd(2020, 1, 1), Date::from_ymd(2035, 1, 1));
  return s;
}

/// An issued passport plus the MRZ a terminal would read from its data page.
struct Issued {
  mrz::Mrz mrz;
  chip::Personalization perso;
};

inline Issued issue_passport(scenarios::World& world, bool eke = false,
                             bool active_auth = true, bool chip_auth = true) {
  Issued out;
  out.mrz = scenarios::sample_mrz(world.rng(), world.clock().today(), world.country().country);
  auto spec = world.passport_spec(out.mrz);
  spec.profile.supports_eke = eke;
  spec.with_active_auth = active_auth;
  spec.with_chip_auth = chip_auth;
  out.perso = world.issue(spec);
  return out;
}

/// Drives a chip below the Terminal API: plain frames, a hand-rolled BAC and
/// raw secure-messaging frames, so tests can tamper with or replay them.
class RawReader {
 public:
  RawReader(chip::ChipEndpoint& chip, Rng& rng) : chip_(chip), rng_(rng) {}

  apdu::Response plain(const apdu::Command& cmd) {
    return apdu::Response::decode(chip_.transmit(cmd.encode()));
  }

  apdu::Response select() {
    return plain({apdu::kClaPlain, apdu::kInsSelect, 0x04, 0x0C,
                  Bytes(std::begin(apdu::kMrtdAid), std::end(apdu::kMrtdAid))});
  }

  bool bac(const mrz::MrzInfo& info) {
    session_.reset();
    select();
    auto challenge = plain({apdu::kClaPlain, apdu::kInsGetChallenge, 0, 0, {}});
    if (!challenge.ok() || challenge.data.size() != 8) return false;
    ByteArray<8> rnd_icc{};
    std::copy(challenge.data.begin(), challenge.data.end(), rnd_icc.begin());
    auto keys = crypto::derive_keys(crypto::derive_seed(info).seed);
    auto rnd_ifd = rng_.array<8>();
    auto k_ifd = rng_.array<16>();
    ByteArray<crypto::kBacPlainSize> msg{};
    auto it = std::copy(rnd_ifd.begin(), rnd_ifd.end(), msg.begin());
    it = std::copy(rnd_icc.begin(), rnd_icc.end(), it);
    std::copy(k_ifd.begin(), k_ifd.end(), it);
    auto r = plain({apdu::kClaPlain, apdu::kInsMutualAuthenticate, 0, 0,
                    crypto::bac_seal(keys, msg)});
    if (!r.ok()) return false;
    auto reply = crypto::bac_open(keys, r.data);
    if (!reply) return false;
    crypto::Key16 k_icc{};
    std::copy_n(reply->begin() + 16, 16, k_icc.begin());
    session_ = crypto::bac_session_keys(k_ifd, k_icc, rnd_icc, rnd_ifd);
    return true;
  }

  /// Wraps `inner` and sends it; the frame is kept for replay().
  apdu::Response secure(const apdu::Command& inner) {
    last_frame_ = crypto::sm_wrap(*session_, inner.encode()).encode();
    return send_frame(last_frame_);
  }

  /// Sends an already-wrapped frame. An outer error status is returned as
  /// is; otherwise the chip's protected answer is unwrapped.
  apdu::Response send_frame(ByteView frame) {
    auto outer = plain({apdu::kClaProtected, apdu::kInsEnvelope, 0, 0,
                        Bytes(frame.begin(), frame.end())});
    if (!outer.ok()) return outer;
    auto inner = crypto::sm_unwrap(*session_, crypto::SmMessage::decode(outer.data));
    return apdu::Response::decode(inner);
  }

  const Bytes& last_frame() const { return last_frame_; }
  const std::optional<crypto::SessionKeys>& session() const { return session_; }
  std::optional<crypto::SessionKeys>& session() { return session_; }

 private:
  chip::ChipEndpoint& chip_;
  Rng& rng_;
  std::optional<crypto::SessionKeys> session_;
  Bytes last_frame_;
};

/// A back office with one registered application authority and a terminal
/// holding a C_AA from it.
struct OnlineTaSetup {
  std::unique_ptr<backoffice::Backoffice> office;
  pki::Issuer authority;
  terminal::OnlineTaCredentials creds;
};

inline OnlineTaSetup make_online_ta(scenarios::World& world, DgSet rights = {kDgFingerprint}) {
  OnlineTaSetup s;
  s.office = std::make_unique<backoffice::Backoffice>(world.country().backoffice,
                                                      world.clock());
  s.authority = {"AUTH", crypto::signature_keygen(world.rng()), pki::Role::kCvcaRoot, {}};
  s.office->register_authority(s.authority.id, s.authority.key.public_key, rights);
  auto k_ta = crypto::signature_keygen(world.rng());
  s.creds.c_aa = pki::issue(s.authority, "TERMINAL", k_ta.public_key,
                            pki::Role::kApplicationAuthority, {kDgFingerprint, kDgIris},
                            Date::from_ymd(2020, 1, 1), Date::from_ymd(2035, 1, 1));
  s.creds.k_ta = k_ta;
  s.creds.service = s.office.get();
  return s;
}

}  // namespace epass::testing
