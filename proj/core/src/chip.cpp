// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "epass/chip.hpp"

#include <algorithm>

#include "epass/signature.hpp"

namespace epass::chip {

using apdu::Command;
using apdu::Response;

namespace {

constexpr std::string_view kTaLabel = "TA";
constexpr std::string_view kOnlineTaLabel = "OTA";
constexpr std::size_t kMaxChainLength = 8;

Response status(std::uint16_t sw) { return Response{{}, sw}; }

Response ok(Bytes data) { return Response{std::move(data), apdu::kSwOk}; }

Bytes rights_bytes(const DgSet& rights) {
  Bytes out;
  encode_dg_set(out, rights);
  return out;
}

}  // namespace

ChipProfile ChipProfile::named(std::string_view name) {
  ChipProfile p;
  if (name == "vendor-a") {
    p.atr = from_hex("3b8880014241454d5256303180");
    return p;
  }
  if (name == "vendor-b") {
    p.name = "vendor-b";
    p.atr = from_hex("3b8980014a434f50343156323431");
    p.sw_unknown_ins = apdu::kSwNoPreciseDiagnosis;
    p.sw_wrong_class = apdu::kSwNoPreciseDiagnosis;
    p.sw_select_unknown = apdu::kSwWrongData;
    p.sw_read_unprotected = apdu::kSwSmMissing;
    p.sw_malformed = apdu::kSwWrongData;
    p.select_time = Millis{7};
    p.challenge_time = Millis{3};
    p.auth_time = Millis{45};
    p.sm_time = Millis{9};
    p.error_time = Millis{5};
    return p;
  }
  throw InvalidInput("profile: unknown chip profile '" + std::string(name) + "'");
}

std::string_view to_string(UidPolicy::Kind k) {
  switch (k) {
    case UidPolicy::Kind::kFixed: return "fixed";
    case UidPolicy::Kind::kRandom: return "random";
    case UidPolicy::Kind::kSubliminal: return "subliminal";
  }
  return "?";
}

std::string_view to_string(ChipPhase p) {
  switch (p) {
    case ChipPhase::kIdle: return "idle";
    case ChipPhase::kBacChallenged: return "bac-challenged";
    case ChipPhase::kSecure: return "secure";
    case ChipPhase::kEacAuthenticated: return "eac-authenticated";
  }
  return "?";
}

Personalization Personalization::clone_without_keys() const {
  Personalization copy = *this;
  copy.keys.active_auth.reset();
  copy.keys.chip_auth.reset();
  return copy;
}

Personalization personalize(const PassportSpec& spec,
                            const pki::CountryPki& country, Rng& rng) {
  mrz::validate(spec.mrz);
  Personalization p;
  p.mrz = spec.mrz;
  p.uid_policy = spec.uid_policy;
  p.profile = spec.profile;
  p.country = country.country;
  p.current_date = spec.issue_date;

  std::map<int, Bytes> dgs;
  std::string td3 = mrz::render_td3(spec.mrz);
  dgs[kDgMrz] = Bytes(td3.begin(), td3.end());
  dgs[kDgFace] = spec.face_image;
  if (!spec.fingerprints.empty()) dgs[kDgFingerprint] = spec.fingerprints;
  if (spec.with_chip_auth) {
    p.keys.chip_auth = crypto::dh_keygen(rng);
    dgs[kDgChipAuthKey] = p.keys.chip_auth->public_key;
  }
  if (spec.with_active_auth) {
    p.keys.active_auth = crypto::signature_keygen(rng);
    const auto& pub = p.keys.active_auth->public_key;
    dgs[kDgAaKey] = Bytes(pub.begin(), pub.end());
  }
  p.keys.cvca_public = country.cvca.public_key;
  p.keys.backoffice_public = country.backoffice.public_key;
  p.lds = build_lds(std::move(dgs), country.document_signer_id(),
                    country.document_signer);
  return p;
}

Bytes terminal_auth_message(ByteView challenge, ByteView ephemeral_public) {
  Bytes out(kTaLabel.begin(), kTaLabel.end());
  append(out, challenge);
  append(out, crypto::sha256(ephemeral_public));
  return out;
}

Bytes online_ta_message(ByteView challenge, ByteView c_aa_encoding) {
  Bytes out(kOnlineTaLabel.begin(), kOnlineTaLabel.end());
  append(out, challenge);
  append(out, crypto::sha256(c_aa_encoding));
  return out;
}

Chip::Chip(Personalization personalization, Rng rng, SimClock& clock,
           ThrottlePolicy throttle)
    : perso_(std::move(personalization)),
      rng_(std::move(rng)),
      clock_(clock),
      throttle_(throttle) {
  password_key_ = crypto::derive_seed(mrz::mrz_info(perso_.mrz)).seed;
  bac_keys_ = crypto::derive_keys(password_key_);
  state_.current_date = perso_.current_date;
}

PowerOn Chip::power_on() {
  reset_session();
  PowerOn out;
  out.atr = perso_.profile.atr;
  switch (perso_.uid_policy.kind) {
    case UidPolicy::Kind::kFixed:
      out.uid = perso_.uid_policy.fixed_uid;
      break;
    case UidPolicy::Kind::kRandom:
      out.uid = rng_.bytes(4);
      break;
    case UidPolicy::Kind::kSubliminal: {
      auto uid = crypto::subliminal_seal(perso_.uid_policy.subliminal_key,
                                         perso_.mrz.document_number, rng_);
      out.uid.assign(uid.begin(), uid.end());
      break;
    }
  }
  return out;
}

void Chip::reset_session() {
  state_.phase = ChipPhase::kIdle;
  state_.session.reset();
  state_.granted_rights.clear();
  state_.chip_authenticated = false;
  terminal_ephemeral_.clear();
  ta_chain_.clear();
  ta_challenge_.reset();
  ota_cert_.reset();
  ota_challenge_.reset();
  ota_nonce_.reset();
}

void Chip::abort_session() { reset_session(); }

void Chip::charge(Millis t) { clock_.advance(t); }

ByteArray<8> Chip::bac_step1() {
  reset_session();
  rnd_icc_ = rng_.array<8>();
  state_.phase = ChipPhase::kBacChallenged;
  return rnd_icc_;
}

std::optional<Bytes> Chip::bac_step2(ByteView cryptogram) {
  if (state_.phase != ChipPhase::kBacChallenged) return std::nullopt;
  state_.phase = ChipPhase::kIdle;

  auto plain = crypto::bac_open(bac_keys_, cryptogram);
  bool echoed = plain && std::equal(rnd_icc_.begin(), rnd_icc_.end(),
                                    plain->begin() + 8);
  if (!echoed) {
    ++failures_;
    Millis delay = throttle_.base;
    for (unsigned i = 1; i < failures_ && delay < throttle_.cap; ++i)
      delay = delay > throttle_.cap / 2 ? throttle_.cap : delay * 2;
    delay = std::min(delay, throttle_.cap);
    charge(delay);
    imposed_delay_ += delay;
    return std::nullopt;
  }
  failures_ = 0;

  ByteArray<8> rnd_ifd{};
  crypto::Key16 k_ifd{};
  std::copy_n(plain->begin(), 8, rnd_ifd.begin());
  std::copy_n(plain->begin() + 16, 16, k_ifd.begin());
  auto k_icc = rng_.array<16>();

  ByteArray<crypto::kBacPlainSize> reply{};
  auto it = std::copy(rnd_icc_.begin(), rnd_icc_.end(), reply.begin());
  it = std::copy(rnd_ifd.begin(), rnd_ifd.end(), it);
  std::copy(k_icc.begin(), k_icc.end(), it);

  state_.session = crypto::bac_session_keys(k_ifd, k_icc, rnd_icc_, rnd_ifd);
  state_.phase = ChipPhase::kSecure;
  return crypto::bac_seal(bac_keys_, reply);
}

Bytes Chip::transmit(ByteView frame) {
  const auto& prof = perso_.profile;
  auto cmd = Command::decode(frame);
  Response r;
  Millis cost = prof.error_time;

  if (!cmd) {
    r = status(prof.sw_malformed);
  } else if (cmd->cla == apdu::kClaProtected) {
    if (cmd->ins == apdu::kInsEnvelope) {
      r = sm_dispatch(cmd->data);
      cost = prof.sm_time;
    } else {
      r = status(prof.sw_unknown_ins);
    }
  } else if (cmd->cla != apdu::kClaPlain) {
    r = status(prof.sw_wrong_class);
  } else {
    switch (cmd->ins) {
      case apdu::kInsSelect: {
        bool mrtd = equal_bytes(cmd->data, ByteView(apdu::kMrtdAid));
        if (mrtd) reset_session();
        r = mrtd ? ok({}) : status(prof.sw_select_unknown);
        cost = prof.select_time;
        break;
      }
      case apdu::kInsGetChallenge: {
        if (!cmd->data.empty()) {
          r = status(prof.sw_malformed);
          break;
        }
        auto c = bac_step1();
        r = ok(Bytes(c.begin(), c.end()));
        cost = prof.challenge_time;
        break;
      }
      case apdu::kInsMutualAuthenticate: {
        if (cmd->data.size() != crypto::kBacCryptogramSize) {
          r = status(prof.sw_malformed);
        } else if (state_.phase != ChipPhase::kBacChallenged) {
          r = status(apdu::kSwConditionsNotSatisfied);
        } else {
          auto reply = bac_step2(cmd->data);
          r = reply ? ok(std::move(*reply)) : status(apdu::kSwAuthFailed);
          cost = prof.auth_time;
        }
        break;
      }
      case apdu::kInsGeneralAuthenticate:
        if (prof.supports_eke) {
          r = eke_authenticate(cmd->data);
          cost = prof.auth_time;
        } else {
          r = status(prof.sw_unknown_ins);
        }
        break;
      case apdu::kInsReadBinary:
        r = status(state_.session ? apdu::kSwSmMissing : prof.sw_read_unprotected);
        break;
      default:
        r = status(prof.sw_unknown_ins);
    }
  }

  charge(cost);
  return r.encode();
}

Response Chip::eke_authenticate(ByteView message) {
  if (message.size() != crypto::kEkeMessageSize)
    return status(perso_.profile.sw_malformed);
  reset_session();
  try {
    auto resp = crypto::eke_respond(password_key_, message, rng_);
    state_.session = resp.keys;
    state_.phase = ChipPhase::kSecure;
    return ok(std::move(resp.message));
  } catch (const Error&) {
    return status(apdu::kSwWrongData);
  }
}

Response Chip::sm_dispatch(ByteView sm_frame) {
  if (!state_.session) return status(apdu::kSwConditionsNotSatisfied);

  Bytes plain;
  try {
    plain = crypto::sm_unwrap(*state_.session, crypto::SmMessage::decode(sm_frame));
  } catch (const Error&) {
    abort_session();
    return status(apdu::kSwSmIncorrect);
  }

  std::optional<crypto::SessionKeys> rekey;
  Response inner;
  auto cmd = Command::decode(plain);
  if (!cmd)
    inner = status(perso_.profile.sw_malformed);
  else if (cmd->ins == apdu::kInsSetKeyAgreement)
    inner = chip_authenticate(cmd->data, rekey);
  else
    inner = dispatch_inner(*cmd);

  Bytes wire = crypto::sm_wrap(*state_.session, inner.encode()).encode();
  if (rekey) state_.session = rekey;
  return ok(std::move(wire));
}

Response Chip::dispatch_inner(const Command& cmd) {
  switch (cmd.ins) {
    case apdu::kInsReadDataGroup:
      if (!cmd.data.empty()) return status(perso_.profile.sw_malformed);
      return read_data_group(cmd.p1);
    case apdu::kInsInternalAuthenticate:
      return active_authenticate(cmd.data);
    case apdu::kInsVerifyCertificate:
      return ta_verify_certificate(cmd.data);
    case apdu::kInsTaGetChallenge:
      return ta_get_challenge();
    case apdu::kInsTaExternalAuthenticate:
      return ta_external_authenticate(cmd.data);
    case apdu::kInsOnlineTaBegin:
      return ota_begin(cmd.data);
    case apdu::kInsOnlineTaProve:
      return ota_prove(cmd.data);
    case apdu::kInsOnlineTaComplete:
      return ota_complete(cmd.data);
    default:
      return status(perso_.profile.sw_unknown_ins);
  }
}

Response Chip::read_data_group(int dg) {
  if (dg == 0) return ok(perso_.lds.security_object.encode());
  auto it = perso_.lds.data_groups.find(dg);
  if (it == perso_.lds.data_groups.end()) return status(apdu::kSwFileNotFound);
  if (is_sensitive(dg) && !(state_.phase == ChipPhase::kEacAuthenticated &&
                            state_.granted_rights.contains(dg)))
    return status(apdu::kSwSecurityNotSatisfied);
  return ok(it->second);
}

Response Chip::active_authenticate(ByteView challenge) {
  if (!perso_.keys.active_auth) return status(perso_.profile.sw_unknown_ins);
  if (challenge.size() != 8) return status(perso_.profile.sw_malformed);
  return ok(crypto::sign(*perso_.keys.active_auth, challenge));
}

Response Chip::chip_authenticate(ByteView terminal_public,
                                 std::optional<crypto::SessionKeys>& rekey) {
  if (!perso_.keys.chip_auth) return status(perso_.profile.sw_unknown_ins);
  if (!crypto::dh_is_valid_public(terminal_public))
    return status(apdu::kSwWrongData);
  auto dh_seed =
      crypto::dh_shared(perso_.keys.chip_auth->private_key, terminal_public);
  auto nonce = rng_.array<8>();
  auto digest = crypto::sha256({dh_seed, nonce});
  crypto::Key16 seed{};
  std::copy_n(digest.begin(), seed.size(), seed.begin());
  rekey = crypto::session_keys(seed, 0);

  terminal_ephemeral_.assign(terminal_public.begin(), terminal_public.end());
  state_.chip_authenticated = true;
  ta_chain_.clear();
  ta_challenge_.reset();
  return ok(Bytes(nonce.begin(), nonce.end()));
}

Response Chip::ta_verify_certificate(ByteView cert) {
  if (!state_.chip_authenticated || !perso_.keys.cvca_public)
    return status(apdu::kSwConditionsNotSatisfied);
  if (ta_chain_.size() >= kMaxChainLength) return status(apdu::kSwWrongData);
  try {
    ta_chain_.push_back(pki::CvCertificate::decode(cert));
  } catch (const Error&) {
    return status(apdu::kSwWrongData);
  }
  return ok({});
}

Response Chip::ta_get_challenge() {
  if (!state_.chip_authenticated) return status(apdu::kSwConditionsNotSatisfied);
  ta_challenge_ = rng_.array<8>();
  return ok(Bytes(ta_challenge_->begin(), ta_challenge_->end()));
}

Response Chip::ta_external_authenticate(ByteView signature) {
  if (!ta_challenge_ || ta_chain_.empty())
    return status(apdu::kSwConditionsNotSatisfied);
  auto challenge = *ta_challenge_;
  auto chain = std::move(ta_chain_);
  ta_challenge_.reset();
  ta_chain_.clear();

  // The chip has no clock of its own: only expiry is checked against the
  // latest date it has seen.
  auto verdict = pki::verify_chain(chain, *perso_.keys.cvca_public,
                                   state_.current_date,
                                   pki::WindowCheck::kExpiryOnly);
  const auto& leaf = chain.back();
  bool proven =
      verdict.ok && leaf.role == pki::Role::kInspectionSystem &&
      crypto::verify(leaf.subject_public,
                     terminal_auth_message(challenge, terminal_ephemeral_),
                     signature);
  if (!proven) return status(apdu::kSwAuthFailed);

  state_.current_date = std::max(state_.current_date, verdict.max_effective_date);
  state_.granted_rights = verdict.rights;
  state_.phase = ChipPhase::kEacAuthenticated;
  return ok(rights_bytes(verdict.rights));
}

Response Chip::ota_begin(ByteView c_aa) {
  if (!state_.session || !perso_.keys.backoffice_public)
    return status(apdu::kSwConditionsNotSatisfied);
  ota_cert_.reset();
  ota_challenge_.reset();
  ota_nonce_.reset();
  try {
    auto cert = pki::CvCertificate::decode(c_aa);
    if (cert.role != pki::Role::kApplicationAuthority)
      return status(apdu::kSwWrongData);
    ota_cert_ = std::move(cert);
  } catch (const Error&) {
    return status(apdu::kSwWrongData);
  }
  ota_challenge_ = rng_.array<16>();
  return ok(Bytes(ota_challenge_->begin(), ota_challenge_->end()));
}

Response Chip::ota_prove(ByteView signature) {
  if (!ota_cert_ || !ota_challenge_)
    return status(apdu::kSwConditionsNotSatisfied);
  auto cert = std::move(*ota_cert_);
  auto challenge = *ota_challenge_;
  ota_cert_.reset();
  ota_challenge_.reset();

  Bytes encoding = cert.encode();
  if (!crypto::verify(cert.subject_public,
                      online_ta_message(challenge, encoding), signature))
    return status(apdu::kSwAuthFailed);

  backoffice::GrantRequest req;
  req.nonce = rng_.array<backoffice::kNonceSize>();
  req.c_aa = std::move(cert);
  req.k_ta = req.c_aa.subject_public;
  ota_nonce_ = req.nonce;
  ota_issued_ = clock_.elapsed();
  return ok(req.encode());
}

Response Chip::ota_complete(ByteView grant_bytes) {
  if (!ota_nonce_) return status(apdu::kSwConditionsNotSatisfied);
  auto nonce = *ota_nonce_;
  ota_nonce_.reset();

  if (grant_bytes.empty() || clock_.elapsed() - ota_issued_ > ota_timeout_)
    return status(apdu::kSwAuthFailed);
  backoffice::Grant grant;
  try {
    grant = backoffice::Grant::decode(grant_bytes);
  } catch (const Error&) {
    return status(apdu::kSwAuthFailed);
  }
  if (grant.nonce != nonce || !grant.verify(*perso_.keys.backoffice_public))
    return status(apdu::kSwAuthFailed);

  state_.granted_rights = grant.rights;
  if (!grant.rights.empty()) state_.phase = ChipPhase::kEacAuthenticated;
  return ok(rights_bytes(grant.rights));
}

}  // namespace epass::chip
