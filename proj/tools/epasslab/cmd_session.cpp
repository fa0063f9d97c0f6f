// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

// gen-passport, run-session, fingerprint

#include <nlohmann/json.hpp>

#include <memory>

#include "cli_common.hpp"
#include "epass/attacks.hpp"
#include "epass/backoffice_server.hpp"
#include "epass/io.hpp"
#include "epass/scenarios.hpp"

namespace epasslab {

namespace {

using namespace epass;

struct GenOptions {
  std::string country = "UTO";
  std::string country_keys;
  std::string document_number;
  std::string birth;
  std::string expiry;
  std::string name;
  std::string sex;
  std::string issue_date;
  std::string profile = "vendor-a";
  std::string uid = "random";
  std::string uid_key;
  bool no_aa = false;
  bool no_chip_auth = false;
  bool eke = false;
};

crypto::UidPublicKey uid_public_from_file(const std::string& path) {
  auto j = nlohmann::json::parse(io::read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("modulus"))
    throw InvalidInput("--uid-key: expected a JSON object with \"modulus\"");
  crypto::UidPublicKey key;
  Bytes m = from_hex(j["modulus"].get<std::string>());
  if (m.size() != key.modulus.size())
    throw InvalidInput("--uid-key: modulus must be 16 bytes");
  std::copy(m.begin(), m.end(), key.modulus.begin());
  key.exponent = j.value("exponent", 65537u);
  return key;
}

int gen_passport(const Globals& g, const GenOptions& o) {
  Rng rng(g.seed);
  pki::CountryPki country = o.country_keys.empty()
                                ? pki::CountryPki::generate(o.country, rng)
                                : io::country_from_json(io::read_file(o.country_keys));

  Date today = Date::from_ymd(2026, 1, 1);
  mrz::Mrz m = scenarios::sample_mrz(rng, today, country.country);
  if (!o.document_number.empty()) m.document_number = o.document_number;
  if (!o.birth.empty()) m.birth_date = parse_date_flag(o.birth, "--birth");
  if (!o.expiry.empty()) m.expiry_date = parse_date_flag(o.expiry, "--expiry");
  if (!o.name.empty()) m.holder_name = o.name;
  if (!o.sex.empty()) m.sex = o.sex;
  mrz::validate(m);

  chip::PassportSpec spec;
  spec.mrz = m;
  spec.face_image = rng.bytes(512);
  spec.fingerprints = rng.bytes(256);
  spec.with_active_auth = !o.no_aa;
  spec.with_chip_auth = !o.no_chip_auth;
  spec.profile = chip::ChipProfile::named(o.profile);
  spec.profile.supports_eke = o.eke;
  spec.issue_date = o.issue_date.empty() ? m.expiry_date.plus_years(-5)
                                         : parse_date_flag(o.issue_date, "--issue-date");
  if (o.uid == "random") {
    spec.uid_policy = chip::UidPolicy::random();
  } else if (o.uid == "fixed") {
    spec.uid_policy = chip::UidPolicy::fixed(rng.bytes(4));
  } else if (o.uid.starts_with("fixed:")) {
    Bytes uid = from_hex(o.uid.substr(6));
    if (uid.empty() || uid.size() > 16) throw InvalidInput("--uid: fixed UID must be 1..16 bytes");
    spec.uid_policy = chip::UidPolicy::fixed(uid);
  } else if (o.uid == "subliminal") {
    if (o.uid_key.empty()) throw InvalidInput("--uid-key: required for --uid subliminal");
    spec.uid_policy = chip::UidPolicy::subliminal(uid_public_from_file(o.uid_key));
  } else {
    throw InvalidInput("--uid: expected random, fixed, fixed:<hex> or subliminal");
  }

  emit(g, io::personalization_to_json(chip::personalize(spec, country, rng)));
  return kExitOk;
}

struct SessionOptions {
  std::string passport;
  std::string country_keys;
  std::string mrz_info;
  std::string document_number;
  std::string birth;
  std::string expiry;
  std::string transcript;
  std::string ta_chain;
  std::string ta_key;
  std::string ota_cert;
  std::string ota_key;
  std::string socket;
  std::string today = "2026-01-01";
  bool eke = false;
  bool no_aa = false;
  bool no_chip_auth = false;
};

int run_session(const Globals& g, const SessionOptions& o) {
  auto perso = io::personalization_from_json(io::read_file(o.passport));
  chip::TrustStore trust;
  if (!o.country_keys.empty()) {
    auto country = io::country_from_json(io::read_file(o.country_keys));
    trust[country.document_signer_id()] = country.document_signer.public_key;
  }

  // The terminal's view of the MRZ; by default it reads the data page right.
  mrz::Mrz seen = perso.mrz;
  if (!o.mrz_info.empty()) {
    auto info = mrz::MrzInfo::parse(o.mrz_info);
    seen.document_number = info.document_number();
    seen.birth_date = Date::parse_yymmdd(info.birth_yymmdd(), true);
    seen.expiry_date = Date::parse_yymmdd(info.expiry_yymmdd(), false);
  }
  if (!o.document_number.empty()) seen.document_number = o.document_number;
  if (!o.birth.empty()) seen.birth_date = parse_date_flag(o.birth, "--birth");
  if (!o.expiry.empty()) seen.expiry_date = parse_date_flag(o.expiry, "--expiry");

  terminal::InspectionOptions options;
  options.use_eke = o.eke;
  options.active_auth = !o.no_aa;
  options.chip_auth = !o.no_chip_auth;
  if (!o.ta_chain.empty() || !o.ta_key.empty()) {
    if (o.ta_chain.empty() || o.ta_key.empty())
      throw InvalidInput("--ta-chain and --ta-key go together");
    options.terminal_auth = terminal::TerminalAuthCredentials{
        io::certificates_from_json(io::read_file(o.ta_chain)),
        io::key_from_json(io::read_file(o.ta_key)).key};
  }
  std::unique_ptr<backoffice::SocketGrantService> service;
  if (!o.ota_cert.empty() || !o.ota_key.empty()) {
    if (o.ota_cert.empty() || o.ota_key.empty() || o.socket.empty())
      throw InvalidInput("--online-ta-cert, --online-ta-key and --backoffice-socket go together");
    auto certs = io::certificates_from_json(io::read_file(o.ota_cert));
    if (certs.size() != 1) throw InvalidInput("--online-ta-cert: expected one certificate");
    service = std::make_unique<backoffice::SocketGrantService>(o.socket);
    options.online_ta = terminal::OnlineTaCredentials{
        certs.front(), io::key_from_json(io::read_file(o.ota_key)).key, service.get()};
  }

  SimClock clock(parse_date_flag(o.today, "--today"));
  Rng rng(g.seed);
  chip::Chip card(perso, rng.fork(), clock);
  terminal::Terminal term({trust, {}}, rng.fork());
  auto report = term.inspect(card, seen, options);

  if (!o.transcript.empty()) io::write_file(o.transcript, report.transcript.to_jsonl());
  emit(g, report.to_json());
  return report.bac_ok && report.failures.empty() ? kExitOk : kExitFailure;
}

struct FingerprintOptions {
  std::vector<std::string> passports;
  int power_cycles = 2;
};

int run_fingerprint(const Globals& g, const FingerprintOptions& o) {
  nlohmann::ordered_json out;
  out["fingerprints"] = nlohmann::ordered_json::array();
  std::vector<attacks::ChipFingerprint> fps;
  Rng rng(g.seed);
  auto probes = attacks::default_probes();
  for (const auto& path : o.passports) {
    SimClock clock;
    chip::Chip card(io::personalization_from_json(io::read_file(path)), rng.fork(), clock);
    fps.push_back(attacks::fingerprint(card, probes, clock, o.power_cycles));
    out["fingerprints"].push_back(nlohmann::ordered_json::parse(fps.back().to_json()));
  }
  if (fps.size() == 2) out["distinguishable"] = attacks::distinguish(fps[0], fps[1]);
  emit(g, out.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

void add_session_commands(CLI::App& app, Globals& g, Action& action) {
  auto gen = std::make_shared<GenOptions>();
  auto* cmd = app.add_subcommand("gen-passport", "Personalize a passport chip");
  cmd->add_option("--country", gen->country, "Issuing state (3 letters)");
  cmd->add_option("--country-keys", gen->country_keys,
                  "Country key file (default: generated from --seed)");
  cmd->add_option("--document-number", gen->document_number);
  cmd->add_option("--birth", gen->birth, "YYYY-MM-DD");
  cmd->add_option("--expiry", gen->expiry, "YYYY-MM-DD");
  cmd->add_option("--name", gen->name, "MRZ name field, e.g. DOE<<JANE");
  cmd->add_option("--sex", gen->sex, "M, F or <");
  cmd->add_option("--issue-date", gen->issue_date, "Initial chip date");
  cmd->add_option("--profile", gen->profile, "vendor-a or vendor-b");
  cmd->add_option("--uid", gen->uid, "random, fixed, fixed:<hex> or subliminal");
  cmd->add_option("--uid-key", gen->uid_key, "UID key file for --uid subliminal");
  cmd->add_flag("--no-aa", gen->no_aa, "Omit active authentication");
  cmd->add_flag("--no-chip-auth", gen->no_chip_auth, "Omit chip authentication");
  cmd->add_flag("--eke", gen->eke, "Chip also accepts the EKE variant");
  cmd->callback([&g, &action, gen] { action = [&g, gen] { return gen_passport(g, *gen); }; });

  auto ses = std::make_shared<SessionOptions>();
  cmd = app.add_subcommand("run-session", "Inspect a passport with a terminal");
  cmd->add_option("--passport", ses->passport, "Personalization file")->required();
  cmd->add_option("--country-keys", ses->country_keys, "Trusted document signer");
  cmd->add_option("--mrz-info", ses->mrz_info, "24-character MRZ information the terminal uses");
  cmd->add_option("--document-number", ses->document_number, "Override what the terminal reads");
  cmd->add_option("--birth", ses->birth, "Override what the terminal reads");
  cmd->add_option("--expiry", ses->expiry, "Override what the terminal reads");
  cmd->add_option("--transcript", ses->transcript, "Write the JSON-lines transcript here");
  cmd->add_option("--ta-chain", ses->ta_chain, "Certificate chain for terminal authentication");
  cmd->add_option("--ta-key", ses->ta_key, "Inspection system key file");
  cmd->add_option("--online-ta-cert", ses->ota_cert, "C_AA certificate file");
  cmd->add_option("--online-ta-key", ses->ota_key, "K_TA key file");
  cmd->add_option("--backoffice-socket", ses->socket, "Back office to relay grants through");
  cmd->add_option("--today", ses->today, "Simulated date");
  cmd->add_flag("--eke", ses->eke, "Use the EKE variant instead of BAC");
  cmd->add_flag("--no-aa", ses->no_aa);
  cmd->add_flag("--no-chip-auth", ses->no_chip_auth);
  cmd->callback([&g, &action, ses] { action = [&g, ses] { return run_session(g, *ses); }; });

  auto fp = std::make_shared<FingerprintOptions>();
  cmd = app.add_subcommand("fingerprint", "Profile chips from pre-BAC behavior");
  cmd->add_option("--passport", fp->passports, "Personalization file (repeatable)")
      ->required();
  cmd->add_option("--power-cycles", fp->power_cycles)->check(CLI::Range(1, 64));
  cmd->callback([&g, &action, fp] { action = [&g, fp] { return run_fingerprint(g, *fp); }; });
}

}  // namespace epasslab
