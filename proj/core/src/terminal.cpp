// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "epass/terminal.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

#include "epass/signature.hpp"

namespace epass::terminal {

using apdu::Command;
using apdu::Response;

namespace {

Command protected_cmd(std::uint8_t ins, std::uint8_t p1 = 0, Bytes data = {}) {
  return Command{apdu::kClaProtected, ins, p1, 0, std::move(data)};
}

std::string sw_text(std::uint16_t sw) {
  Bytes b;
  append_u16(b, sw);
  return "status " + to_hex(b);
}

bool is_sm_command(ByteView frame) {
  auto cmd = Command::decode(frame);
  return cmd && cmd->cla == apdu::kClaProtected && cmd->ins == apdu::kInsEnvelope;
}

}  // namespace

std::string InspectionReport::to_json() const {
  nlohmann::ordered_json j;
  j["bac_ok"] = bac_ok;
  j["pa_ok"] = pa_ok;
  j["aa_ok"] = aa_ok;
  j["chip_auth_ok"] = chip_auth_ok;
  j["ta_ok"] = ta_ok;
  j["dgs_read"] = dgs_read;
  j["rights"] = rights;
  j["failures"] = nlohmann::ordered_json::array();
  for (const auto& f : failures)
    j["failures"].push_back({{"check", f.check}, {"reason", f.reason}});
  j["transcript_entries"] = transcript.size();
  return j.dump(2) + "\n";
}

Terminal::Terminal(TerminalConfig config, Rng rng)
    : config_(std::move(config)), rng_(std::move(rng)) {}

void Terminal::reset() {
  endpoint_ = nullptr;
  session_.reset();
  sod_.reset();
  ephemeral_public_.clear();
  last_aa_.reset();
  report_ = {};
  plaintexts_.clear();
  epochs_.clear();
}

void Terminal::fail(std::string check, std::string reason) {
  report_.failures.push_back({std::move(check), std::move(reason)});
}

void Terminal::record(Direction d, Phase p, ByteView payload) {
  report_.transcript.add(d, p, payload);
}

chip::PowerOn Terminal::power_on(chip::ChipEndpoint& endpoint) {
  endpoint_ = &endpoint;
  session_.reset();
  auto info = endpoint.power_on();
  record(Direction::kChipToTerminal, Phase::kUid, info.uid);
  record(Direction::kChipToTerminal, Phase::kUid, info.atr);
  return info;
}

Response Terminal::exchange(Phase phase, const Command& cmd) {
  if (!endpoint_) throw ProtocolError("no chip connected");
  Bytes frame = cmd.encode();
  record(Direction::kTerminalToChip, phase, frame);
  Bytes reply = endpoint_->transmit(frame);
  record(Direction::kChipToTerminal, phase, reply);
  try {
    return Response::decode(reply);
  } catch (const ProtocolError&) {
    return Response{{}, apdu::kSwNoPreciseDiagnosis};
  }
}

Response Terminal::secure(Phase phase, const Command& inner) {
  if (!session_) return Response{{}, apdu::kSwConditionsNotSatisfied};
  Bytes plain = inner.encode();
  auto wire = crypto::sm_wrap(*session_, plain).encode();
  std::size_t command_seq = report_.transcript.size();
  auto outer = exchange(phase, protected_cmd(apdu::kInsEnvelope, 0, wire));
  plaintexts_.push_back({command_seq, std::move(plain)});
  if (!outer.ok()) {
    session_.reset();
    fail("sm", "chip ended secure messaging with " + sw_text(outer.sw));
    return Response{{}, outer.sw};
  }
  try {
    Bytes reply = crypto::sm_unwrap(*session_, crypto::SmMessage::decode(outer.data));
    plaintexts_.push_back({report_.transcript.size() - 1, reply});
    return Response::decode(reply);
  } catch (const Error& e) {
    session_.reset();
    fail("sm", std::string("response rejected: ") + e.what());
    return Response{{}, apdu::kSwSmIncorrect};
  }
}

bool Terminal::bac_attempt(const crypto::DerivedKeys& keys, bool& rejected) {
  rejected = false;
  auto challenge = exchange(Phase::kBac, Command{apdu::kClaPlain,
                                                 apdu::kInsGetChallenge, 0, 0, {}});
  if (!challenge.ok() || challenge.data.size() != 8) return false;

  ByteArray<8> rnd_icc{};
  std::copy(challenge.data.begin(), challenge.data.end(), rnd_icc.begin());
  auto rnd_ifd = rng_.array<8>();
  auto k_ifd = rng_.array<16>();
  ByteArray<crypto::kBacPlainSize> s{};
  auto it = std::copy(rnd_ifd.begin(), rnd_ifd.end(), s.begin());
  it = std::copy(rnd_icc.begin(), rnd_icc.end(), it);
  std::copy(k_ifd.begin(), k_ifd.end(), it);

  auto answer = exchange(Phase::kBac,
                         Command{apdu::kClaPlain, apdu::kInsMutualAuthenticate,
                                 0, 0, crypto::bac_seal(keys, s)});
  if (answer.sw == apdu::kSwAuthFailed) {
    rejected = true;
    return false;
  }
  if (!answer.ok()) return false;

  auto plain = crypto::bac_open(keys, answer.data);
  if (!plain || !std::equal(rnd_icc.begin(), rnd_icc.end(), plain->begin()) ||
      !std::equal(rnd_ifd.begin(), rnd_ifd.end(), plain->begin() + 8)) {
    rejected = true;
    return false;
  }
  crypto::Key16 k_icc{};
  std::copy_n(plain->begin() + 16, 16, k_icc.begin());
  session_ = crypto::bac_session_keys(k_ifd, k_icc, rnd_icc, rnd_ifd);
  epochs_.push_back({report_.transcript.size(), *session_});
  return true;
}

bool Terminal::run_bac(chip::ChipEndpoint& endpoint, const mrz::MrzInfo& info) {
  endpoint_ = &endpoint;
  session_.reset();
  auto keys = crypto::derive_keys(crypto::derive_seed(info).seed);
  bool rejected = false;
  bool ok = bac_attempt(keys, rejected);
  if (!ok && !rejected) ok = bac_attempt(keys, rejected);
  report_.bac_ok = ok;
  if (!ok)
    fail("bac", rejected ? "chip rejected the MRZ-derived keys"
                         : "chip did not complete the protocol");
  return ok;
}

bool Terminal::run_eke(chip::ChipEndpoint& endpoint, const mrz::MrzInfo& info) {
  endpoint_ = &endpoint;
  session_.reset();
  auto password = crypto::derive_seed(info).seed;
  auto init = crypto::eke_initiate(password, rng_);
  auto answer = exchange(Phase::kEke, Command{apdu::kClaPlain,
                                              apdu::kInsGeneralAuthenticate, 0,
                                              0, init.message});
  if (answer.ok() && answer.data.size() == crypto::kEkeMessageSize) {
    try {
      session_ = crypto::eke_finish(password, init.private_key, answer.data);
      epochs_.push_back({report_.transcript.size(), *session_});
    } catch (const Error&) {
      session_.reset();
    }
  }
  // A wrong password only shows up as a failed first protected exchange.
  bool ok = session_.has_value() && read_dg(0).has_value();
  report_.bac_ok = ok;
  if (!ok) fail("eke", "no session with the MRZ-derived password");
  return ok;
}

std::optional<Bytes> Terminal::read_dg(int dg) {
  auto r = secure(Phase::kSm,
                  protected_cmd(apdu::kInsReadDataGroup, static_cast<std::uint8_t>(dg)));
  if (!r.ok()) return std::nullopt;
  if (dg == 0) {
    try {
      sod_ = chip::SecurityObject::decode(r.data);
    } catch (const Error&) {
      fail("pa", "malformed security object");
      return std::nullopt;
    }
  } else {
    report_.data_groups[dg] = r.data;
    report_.dgs_read.insert(dg);
  }
  return r.data;
}

void Terminal::read_lds() {
  if (!sod_ && !read_dg(0)) {
    fail("lds", "security object unreadable");
    return;
  }
  for (const auto& [dg, hash] : sod_->hashes) {
    if (is_sensitive(dg) || report_.dgs_read.contains(dg)) continue;
    if (!read_dg(dg)) fail("lds", "DG" + std::to_string(dg) + " unreadable");
  }
}

bool Terminal::verify_pa() {
  if (!sod_) {
    report_.pa_ok = false;
    fail("pa", "no security object");
    return false;
  }
  auto verdict = chip::verify_passive(*sod_, report_.data_groups,
                                      config_.document_signers);
  report_.pa_ok = verdict.ok;
  if (!verdict.ok) fail("pa", verdict.reason);
  return verdict.ok;
}

bool Terminal::verify_aa() {
  report_.aa_ok = false;
  if (!report_.data_groups.contains(kDgAaKey) && !read_dg(kDgAaKey)) {
    fail("aa", "no DG15 public key");
    return false;
  }
  auto challenge = config_.aa_challenge ? config_.aa_challenge() : rng_.array<8>();
  auto r = secure(Phase::kSm,
                  protected_cmd(apdu::kInsInternalAuthenticate, 0,
                                Bytes(challenge.begin(), challenge.end())));
  if (!r.ok()) {
    fail("aa", "chip refused: " + sw_text(r.sw));
    return false;
  }
  last_aa_ = AaExchange{challenge, r.data};
  bool ok = crypto::verify(report_.data_groups.at(kDgAaKey), challenge, r.data);
  if (!ok) fail("aa", "signature does not verify under DG15");
  report_.aa_ok = ok;
  return ok;
}

bool Terminal::run_chip_auth() {
  report_.chip_auth_ok = false;
  if (!report_.data_groups.contains(kDgChipAuthKey) && !read_dg(kDgChipAuthKey)) {
    fail("chip-auth", "no DG14 public key");
    return false;
  }
  auto eph = crypto::dh_keygen(rng_);
  auto r = secure(Phase::kEac,
                  protected_cmd(apdu::kInsSetKeyAgreement, 0, eph.public_key));
  if (!r.ok() || r.data.size() != 8) {
    fail("chip-auth", "chip refused: " + sw_text(r.sw));
    return false;
  }
  crypto::Key16 dh_seed{};
  try {
    dh_seed = crypto::dh_shared(eph.private_key, report_.data_groups.at(kDgChipAuthKey));
  } catch (const Error&) {
    fail("chip-auth", "DG14 is not a valid group element");
    return false;
  }
  auto digest = crypto::sha256({dh_seed, r.data});
  crypto::Key16 seed{};
  std::copy_n(digest.begin(), seed.size(), seed.begin());
  session_ = crypto::session_keys(seed, 0);
  epochs_.push_back({report_.transcript.size(), *session_});
  ephemeral_public_ = eph.public_key;

  // Key confirmation: only the holder of the DG14 private key can answer
  // under the new keys.
  Bytes dg1_before = report_.data_groups.count(kDgMrz)
                         ? report_.data_groups.at(kDgMrz)
                         : Bytes{};
  auto dg1 = read_dg(kDgMrz);
  bool ok = dg1.has_value() && (dg1_before.empty() || *dg1 == dg1_before);
  if (!ok) fail("chip-auth", "no key confirmation under the new session keys");
  report_.chip_auth_ok = ok;
  return ok;
}

DgSet Terminal::run_terminal_auth(const TerminalAuthCredentials& creds) {
  report_.ta_ok = false;
  if (!report_.chip_auth_ok) {
    fail("ta", "requires chip authentication");
    return {};
  }
  for (const auto& cert : creds.chain) {
    auto r = secure(Phase::kEac,
                    protected_cmd(apdu::kInsVerifyCertificate, 0, cert.encode()));
    if (!r.ok()) {
      fail("ta", "certificate " + cert.subject_id + " refused: " + sw_text(r.sw));
      return {};
    }
  }
  auto challenge = secure(Phase::kEac, protected_cmd(apdu::kInsTaGetChallenge));
  if (!challenge.ok() || challenge.data.size() != 8) {
    fail("ta", "no challenge: " + sw_text(challenge.sw));
    return {};
  }
  auto sig = crypto::sign(creds.leaf_key,
                          chip::terminal_auth_message(challenge.data, ephemeral_public_));
  auto r = secure(Phase::kEac,
                  protected_cmd(apdu::kInsTaExternalAuthenticate, 0, sig));
  if (!r.ok()) {
    fail("ta", "chip rejected the terminal: " + sw_text(r.sw));
    return {};
  }
  try {
    ByteReader reader(r.data);
    report_.rights = decode_dg_set(reader);
    reader.expect_end();
  } catch (const Error&) {
    fail("ta", "malformed rights");
    return {};
  }
  report_.ta_ok = true;
  return report_.rights;
}

DgSet Terminal::run_online_ta(const OnlineTaCredentials& creds) {
  report_.ta_ok = false;
  if (!creds.service) throw InvalidInput("online TA needs a grant service");
  Bytes c_aa = creds.c_aa.encode();
  auto challenge = secure(Phase::kOnlineTa,
                          protected_cmd(apdu::kInsOnlineTaBegin, 0, c_aa));
  if (!challenge.ok() || challenge.data.size() != backoffice::kNonceSize) {
    fail("online-ta", "chip refused C_AA: " + sw_text(challenge.sw));
    return {};
  }
  auto sig = crypto::sign(creds.k_ta, chip::online_ta_message(challenge.data, c_aa));
  auto request = secure(Phase::kOnlineTa,
                        protected_cmd(apdu::kInsOnlineTaProve, 0, sig));
  if (!request.ok()) {
    fail("online-ta", "chip rejected K_TA proof: " + sw_text(request.sw));
    return {};
  }
  std::optional<Bytes> grant;
  try {
    grant = creds.service->relay(request.data);
  } catch (const Error&) {
    grant.reset();
  }
  if (!grant) fail("online-ta", "back office did not answer");
  auto r = secure(Phase::kOnlineTa, protected_cmd(apdu::kInsOnlineTaComplete, 0,
                                                  grant.value_or(Bytes{})));
  if (!r.ok()) {
    fail("online-ta", "chip rejected the grant: " + sw_text(r.sw));
    return {};
  }
  try {
    ByteReader reader(r.data);
    report_.rights = decode_dg_set(reader);
    reader.expect_end();
  } catch (const Error&) {
    fail("online-ta", "malformed rights");
    return {};
  }
  report_.ta_ok = !report_.rights.empty();
  if (!report_.ta_ok) fail("online-ta", "grant carries no rights");
  return report_.rights;
}

void Terminal::read_granted() {
  if (!sod_) return;
  for (int dg : report_.rights) {
    if (!is_sensitive(dg) || !sod_->hashes.contains(dg) ||
        report_.dgs_read.contains(dg))
      continue;
    if (!read_dg(dg)) fail("ta", "DG" + std::to_string(dg) + " unreadable");
  }
}

InspectionReport Terminal::inspect(chip::ChipEndpoint& endpoint,
                                   const mrz::Mrz& mrz,
                                   const InspectionOptions& options) {
  reset();
  power_on(endpoint);
  std::vector<std::uint8_t> aid(std::begin(apdu::kMrtdAid), std::end(apdu::kMrtdAid));
  auto selected =
      exchange(Phase::kBac, Command{apdu::kClaPlain, apdu::kInsSelect, 0x04, 0x0C, aid});
  if (!selected.ok()) fail("select", "eMRTD application: " + sw_text(selected.sw));

  auto info = mrz::mrz_info(mrz);
  bool ok = options.use_eke ? run_eke(endpoint, info) : run_bac(endpoint, info);
  if (!ok) return report_;

  read_lds();
  verify_pa();
  if (options.active_auth) verify_aa();
  if (options.chip_auth) run_chip_auth();
  if (options.terminal_auth) run_terminal_auth(*options.terminal_auth);
  if (options.online_ta && session_) run_online_ta(*options.online_ta);
  if (report_.ta_ok) {
    read_granted();
    verify_pa();
  }
  return report_;
}

std::vector<PlaintextRecord> decrypt_transcript(const Transcript& transcript,
                                                std::span<const KeyEpoch> epochs) {
  std::vector<PlaintextRecord> out;
  std::optional<crypto::SessionKeys> keys;
  std::size_t next_epoch = 0;
  bool awaiting_response = false;
  const auto& entries = transcript.entries();
  for (std::size_t seq = 0; seq < entries.size(); ++seq) {
    while (next_epoch < epochs.size() && epochs[next_epoch].first_seq <= seq)
      keys = epochs[next_epoch++].keys;
    const auto& e = entries[seq];
    if (e.direction == Direction::kTerminalToChip) {
      awaiting_response = is_sm_command(e.payload);
      if (!awaiting_response) continue;
      if (!keys) throw IntegrityError("protected frame before any session");
      auto cmd = Command::decode(e.payload);
      out.push_back({seq, crypto::sm_unwrap(*keys, crypto::SmMessage::decode(cmd->data))});
    } else if (awaiting_response) {
      awaiting_response = false;
      auto r = Response::decode(e.payload);
      if (!r.ok()) continue;
      out.push_back({seq, crypto::sm_unwrap(*keys, crypto::SmMessage::decode(r.data))});
    }
  }
  return out;
}

}  // namespace epass::terminal
