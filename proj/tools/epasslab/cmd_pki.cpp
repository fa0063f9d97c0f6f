// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

// init-country, keygen, uid-keygen, issue-root, issue, verify, dump

#include <nlohmann/json.hpp>

#include <memory>

#include "cli_common.hpp"
#include "epass/io.hpp"
#include "epass/uid_cipher.hpp"

namespace epasslab {

namespace {

using namespace epass;

struct PkiOptions {
  std::string country = "UTO";
  std::string country_keys;
  std::string id;
  std::string role = "is";
  std::string rights;
  std::string issuer_key;
  std::string subject_key;
  std::string from;
  std::string to;
  std::string chain;
  std::string as_of = "2026-01-01";
  bool expiry_only = false;
};

pki::Issuer load_issuer(const PkiOptions& o) {
  if (!o.issuer_key.empty() == !o.country_keys.empty())
    throw InvalidInput("give exactly one of --issuer-key and --country-keys");
  if (!o.country_keys.empty())
    return io::country_from_json(io::read_file(o.country_keys)).cvca_issuer();
  return io::key_from_json(io::read_file(o.issuer_key)).issuer();
}

int init_country(const Globals& g, const PkiOptions& o) {
  Rng rng(g.seed);
  emit(g, io::country_to_json(pki::CountryPki::generate(o.country, rng)));
  return kExitOk;
}

int keygen(const Globals& g, const PkiOptions& o) {
  if (o.id.empty()) throw InvalidInput("--id: required");
  Rng rng(g.seed);
  io::KeyFile k;
  k.id = o.id;
  k.role = pki::parse_role(o.role);
  if (!o.rights.empty()) k.rights = parse_dgs_flag(o.rights, "--rights");
  k.key = crypto::signature_keygen(rng);
  emit(g, io::key_to_json(k));
  return kExitOk;
}

int uid_keygen(const Globals& g) {
  Rng rng(g.seed);
  auto key = crypto::uid_keygen(rng);
  nlohmann::ordered_json j;
  j["modulus"] = to_hex(key.public_key.modulus);
  j["exponent"] = key.public_key.exponent;
  j["private_exponent"] = to_hex(key.private_exponent);
  emit(g, j.dump(2) + "\n");
  return kExitOk;
}

int issue_root(const Globals& g, const PkiOptions& o) {
  if (o.country_keys.empty()) throw InvalidInput("--country-keys: required");
  auto country = io::country_from_json(io::read_file(o.country_keys));
  auto cert = pki::issue_root(country.cvca_issuer(), parse_date_flag(o.from, "--from"),
                              parse_date_flag(o.to, "--to"));
  emit(g, io::certificates_to_json(std::span(&cert, 1)));
  return kExitOk;
}

int issue_cert(const Globals& g, const PkiOptions& o) {
  if (o.subject_key.empty()) throw InvalidInput("--subject-key: required");
  auto issuer = load_issuer(o);
  auto subject = io::key_from_json(io::read_file(o.subject_key));
  DgSet rights = o.rights.empty() ? subject.rights : parse_dgs_flag(o.rights, "--rights");
  auto cert = pki::issue(issuer, subject.id, subject.key.public_key, subject.role, rights,
                         parse_date_flag(o.from, "--from"), parse_date_flag(o.to, "--to"));
  emit(g, io::certificates_to_json(std::span(&cert, 1)));
  return kExitOk;
}

int verify(const Globals& g, const PkiOptions& o) {
  if (o.country_keys.empty()) throw InvalidInput("--country-keys: required");
  auto country = io::country_from_json(io::read_file(o.country_keys));
  auto chain = io::certificates_from_json(io::read_file(o.chain));
  auto verdict = pki::verify_chain(
      chain, country.cvca.public_key, parse_date_flag(o.as_of, "--as-of"),
      o.expiry_only ? pki::WindowCheck::kExpiryOnly : pki::WindowCheck::kFull);
  nlohmann::ordered_json j;
  j["valid"] = verdict.ok;
  if (verdict.ok) {
    j["rights"] = verdict.rights;
    j["max_effective_date"] = verdict.max_effective_date.iso();
  } else {
    j["reason"] = verdict.reason;
  }
  emit(g, j.dump(2) + "\n");
  return verdict.ok ? kExitOk : kExitFailure;
}

int dump(const Globals& g, const PkiOptions& o) {
  emit(g, io::certificates_to_json(io::certificates_from_json(io::read_file(o.chain))));
  return kExitOk;
}

}  // namespace

void add_pki_commands(CLI::App& app, Globals& g, Action& action) {
  auto o = std::make_shared<PkiOptions>();
  auto* pki = app.add_subcommand("pki", "Country keys and card-verifiable certificates");
  pki->require_subcommand(1);

  auto* cmd = pki->add_subcommand("init-country", "Generate a country's signing keys");
  cmd->add_option("--country", o->country, "Three-letter code");
  cmd->callback([&g, &action, o] { action = [&g, o] { return init_country(g, *o); }; });

  cmd = pki->add_subcommand("keygen", "Generate an authority or terminal key");
  cmd->add_option("--id", o->id, "Subject identifier")->required();
  cmd->add_option("--role", o->role,
                  "cvca-root, dv, is or application-authority");
  cmd->add_option("--rights", o->rights, "Data groups, e.g. 3,4");
  cmd->callback([&g, &action, o] { action = [&g, o] { return keygen(g, *o); }; });

  cmd = pki->add_subcommand("uid-keygen", "Generate a key for subliminal UIDs");
  cmd->callback([&g, &action] { action = [&g] { return uid_keygen(g); }; });

  cmd = pki->add_subcommand("issue-root", "Self-sign the CVCA certificate");
  cmd->add_option("--country-keys", o->country_keys, "Country key file")->required();
  cmd->add_option("--from", o->from, "Effective date")->required();
  cmd->add_option("--to", o->to, "Expiry date")->required();
  cmd->callback([&g, &action, o] { action = [&g, o] { return issue_root(g, *o); }; });

  cmd = pki->add_subcommand("issue", "Certify a subject key");
  cmd->add_option("--country-keys", o->country_keys, "Issue as the CVCA");
  cmd->add_option("--issuer-key", o->issuer_key, "Issue as this key file");
  cmd->add_option("--subject-key", o->subject_key, "Key file of the subject")->required();
  cmd->add_option("--rights", o->rights, "Override the subject's rights");
  cmd->add_option("--from", o->from, "Effective date")->required();
  cmd->add_option("--to", o->to, "Expiry date")->required();
  cmd->callback([&g, &action, o] { action = [&g, o] { return issue_cert(g, *o); }; });

  cmd = pki->add_subcommand("verify", "Verify a root-first certificate chain");
  cmd->add_option("--chain", o->chain, "Certificate file")->required();
  cmd->add_option("--country-keys", o->country_keys, "Supplies the trusted CVCA key")
      ->required();
  cmd->add_option("--as-of", o->as_of, "Verification date");
  cmd->add_flag("--expiry-only", o->expiry_only,
                "Check expiry only, as a chip without a clock does");
  cmd->callback([&g, &action, o] { action = [&g, o] { return verify(g, *o); }; });

  cmd = pki->add_subcommand("dump", "Decode certificates and print their fields");
  cmd->add_option("--cert", o->chain, "Certificate file")->required();
  cmd->callback([&g, &action, o] { action = [&g, o] { return dump(g, *o); }; });
}

}  // namespace epasslab
