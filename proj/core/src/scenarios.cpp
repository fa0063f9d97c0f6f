// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "epass/scenarios.hpp"

#include <array>
#include <sstream>

#include "epass/signature.hpp"
#include "epass/uid_cipher.hpp"

namespace epass::scenarios {

namespace {

constexpr std::array<const char*, 8> kNames = {
    "JANSEN<<EMMA",       "DE<VRIES<<DAAN",   "BAKKER<<SOPHIE", "VISSER<<LUCAS",
    "SMIT<<JULIA<MARIA",  "MEIJER<<SEM",      "MULDER<<TESS",   "BOS<<MILAN<PIETER"};

Bytes opaque_blob(Rng& rng, std::string_view tag, std::size_t n) {
  Bytes out(tag.begin(), tag.end());
  append(out, rng.bytes(n));
  return out;
}

}  // namespace

mrz::SequentialNumbering demo_numbering() {
  return {20'000'000, 0, "P"};
}

mrz::Mrz sample_mrz(Rng& rng, Date today, const std::string& country) {
  mrz::Mrz m;
  m.issuing_state = country;
  m.nationality = country;
  m.holder_name = kNames[rng.uniform(kNames.size())];
  m.sex = rng.uniform(2) ? "F" : "M";
  auto numbering = demo_numbering();
  m.document_number = numbering.render(rng.uniform(numbering.max_population));
  m.birth_date = Date::from_ymd(1940, 1, 1).plus_days(
      static_cast<int>(rng.uniform(65 * 365)));
  Date issued = today.plus_days(-static_cast<int>(rng.uniform(5 * 365)));
  m.expiry_date = issued.plus_years(5);
  mrz::validate(m);
  return m;
}

World::World(std::uint64_t seed, std::string country, Date today)
    : rng_(seed), clock_(today) {
  country_ = pki::CountryPki::generate(std::move(country), rng_);
}

chip::TrustStore World::trust() const {
  return {{country_.document_signer_id(), country_.document_signer.public_key}};
}

chip::PassportSpec World::passport_spec(const mrz::Mrz& mrz) const {
  chip::PassportSpec spec;
  spec.mrz = mrz;
  spec.profile = chip::ChipProfile::named("vendor-a");
  spec.issue_date = mrz.expiry_date.plus_years(-5);
  return spec;
}

chip::Personalization World::issue(const chip::PassportSpec& spec) {
  chip::PassportSpec s = spec;
  if (s.face_image.empty()) s.face_image = opaque_blob(rng_, "FACE", 512);
  if (s.fingerprints.empty()) s.fingerprints = opaque_blob(rng_, "FINGER", 256);
  return chip::personalize(s, country_, rng_);
}

chip::Chip World::make_chip(chip::Personalization perso) {
  return chip::Chip(std::move(perso), rng_.fork(), clock_);
}

terminal::Terminal World::make_terminal(terminal::ChallengeSource aa) {
  return terminal::Terminal({trust(), std::move(aa)}, rng_.fork());
}

RecordedSession record_session(World& world, bool eke) {
  RecordedSession out;
  out.mrz = sample_mrz(world.rng(), world.clock().today(), world.country().country);
  auto spec = world.passport_spec(out.mrz);
  spec.profile.supports_eke = eke;
  auto chip = world.make_chip(world.issue(spec));
  auto term = world.make_terminal();
  terminal::InspectionOptions options;
  options.use_eke = eke;
  out.report = term.inspect(chip, out.mrz, options);
  out.transcript = out.report.transcript;
  return out;
}

std::string StolenTerminalOutcome::summary() const {
  std::ostringstream s;
  s << "stolen IS certificate expired " << stolen_expiry.iso() << "\n"
    << "stale-clock chip (current_date " << stale_date_before.iso() << "): "
    << (stale_chip_accepts ? "ACCEPTED" : "REJECTED") << "\n"
    << "same chip after a newer valid chain (current_date "
    << stale_date_after.iso() << "): "
    << (stale_chip_rejects_after_update ? "REJECTED" : "ACCEPTED") << "\n"
    << "fresh-clock chip: " << (fresh_chip_rejects ? "REJECTED" : "ACCEPTED")
    << "\n";
  return s.str();
}

StolenTerminalOutcome stolen_terminal_demo(std::uint64_t seed) {
  World world(seed);
  const auto& country = world.country();
  auto cvca = country.cvca_issuer();
  auto root = pki::issue_root(cvca, Date::from_ymd(2024, 1, 1),
                              Date::from_ymd(2030, 1, 1));

  pki::Issuer dv{"UTO-DV1", crypto::signature_keygen(world.rng()),
                 pki::Role::kDocumentVerifier, {kDgFingerprint, kDgIris}};
  auto dv_cert = pki::issue(cvca, dv.id, dv.key.public_key, dv.role, dv.rights,
                            Date::from_ymd(2025, 1, 1), Date::from_ymd(2026, 12, 31));

  auto stolen_key = crypto::signature_keygen(world.rng());
  auto stolen_cert = pki::issue(dv, "UTO-IS-17", stolen_key.public_key,
                                pki::Role::kInspectionSystem, {kDgFingerprint},
                                Date::from_ymd(2025, 4, 1), Date::from_ymd(2025, 5, 1));
  auto fresh_key = crypto::signature_keygen(world.rng());
  auto fresh_cert = pki::issue(dv, "UTO-IS-18", fresh_key.public_key,
                               pki::Role::kInspectionSystem, {kDgFingerprint},
                               Date::from_ymd(2025, 12, 20), Date::from_ymd(2026, 1, 20));

  terminal::TerminalAuthCredentials stolen{{root, dv_cert, stolen_cert}, stolen_key};
  terminal::TerminalAuthCredentials fresh{{root, dv_cert, fresh_cert}, fresh_key};

  auto run = [&](chip::Chip& chip, const mrz::Mrz& mrz,
                 const terminal::TerminalAuthCredentials& creds) {
    auto term = world.make_terminal();
    terminal::InspectionOptions options;
    options.terminal_auth = creds;
    return term.inspect(chip, mrz, options).ta_ok;
  };

  StolenTerminalOutcome out;
  out.stolen_expiry = stolen_cert.expiry_date;

  // Infrequent traveller: chip last saw a date when it was personalized.
  auto stale_mrz = sample_mrz(world.rng(), world.clock().today(), country.country);
  auto stale_spec = world.passport_spec(stale_mrz);
  stale_spec.issue_date = Date::from_ymd(2025, 3, 1);
  auto stale = world.make_chip(world.issue(stale_spec));
  out.stale_date_before = stale.state().current_date;
  out.stale_chip_accepts = run(stale, stale_mrz, stolen);
  run(stale, stale_mrz, fresh);
  out.stale_date_after = stale.state().current_date;
  out.stale_chip_rejects_after_update = !run(stale, stale_mrz, stolen);

  auto fresh_mrz = sample_mrz(world.rng(), world.clock().today(), country.country);
  auto fresh_spec = world.passport_spec(fresh_mrz);
  fresh_spec.issue_date = Date::from_ymd(2025, 11, 15);
  auto fresh_chip = world.make_chip(world.issue(fresh_spec));
  out.fresh_chip_rejects = !run(fresh_chip, fresh_mrz, stolen);
  return out;
}

std::string EkeDemoOutcome::summary() const {
  std::ostringstream s;
  s << "candidate space: " << space_size << " MRZ guesses around "
    << truth << "\n"
    << "classic BAC transcript: " << classic.survivors.size() << " survivor(s)\n"
    << "EKE transcript:         " << eke.survivors.size() << " survivor(s)\n";
  return s.str();
}

EkeDemoOutcome eke_demo(std::uint64_t seed, int space_bits, unsigned workers) {
  World world(seed);
  auto mrz = sample_mrz(world.rng(), world.clock().today(), world.country().country);
  auto spec = world.passport_spec(mrz);
  spec.profile.supports_eke = true;
  auto perso = world.issue(spec);

  auto classic_chip = world.make_chip(perso);
  auto classic = world.make_terminal().inspect(classic_chip, mrz);
  auto eke_chip = world.make_chip(perso);
  terminal::InspectionOptions options;
  options.use_eke = true;
  auto eke = world.make_terminal().inspect(eke_chip, mrz, options);

  auto space = attacks::neighborhood_space(mrz, demo_numbering(), space_bits, 0,
                                           world.rng());
  EkeDemoOutcome out;
  out.truth = mrz::mrz_info(mrz).value();
  out.space_size = space.count();
  out.classic = attacks::offline_search(classic.transcript, space, workers);
  out.eke = attacks::offline_search(eke.transcript, space, workers);
  return out;
}

std::string SubliminalOutcome::summary() const {
  std::ostringstream s;
  s << "uniformity over " << uniformity.samples << " UIDs: chi2 = "
    << uniformity.chi_squared << ", p = " << uniformity.p_value
    << (uniformity.flagged_nonrandom ? " (flagged non-random)" : " (looks random)")
    << "\n"
    << "decoded with the private key: " << decoded_correctly << "/" << decode_trials
    << "\n"
    << "random UIDs rejected by the redundancy check: " << random_rejected << "/"
    << random_trials << "\n";
  return s.str();
}

SubliminalOutcome subliminal_demo(std::uint64_t seed, std::size_t samples,
                                  std::size_t decode_trials) {
  World world(seed);
  auto secret = crypto::uid_keygen(world.rng());

  auto make = [&] {
    auto mrz = sample_mrz(world.rng(), world.clock().today(), world.country().country);
    auto spec = world.passport_spec(mrz);
    spec.with_chip_auth = false;
    spec.uid_policy = chip::UidPolicy::subliminal(secret.public_key);
    return std::make_pair(mrz, world.make_chip(world.issue(spec)));
  };

  SubliminalOutcome out;
  std::vector<std::pair<mrz::Mrz, chip::Chip>> chips;
  for (std::size_t i = 0; i < decode_trials; ++i) chips.push_back(make());

  for (auto& [mrz, chip] : chips) {
    auto uid = chip.power_on().uid;
    auto decoded = attacks::subliminal_decode(uid, secret);
    ++out.decode_trials;
    if (decoded && *decoded == mrz.document_number) ++out.decoded_correctly;
  }

  std::vector<Bytes> uids;
  uids.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i)
    uids.push_back(chips[i % chips.size()].second.power_on().uid);
  out.uniformity = attacks::subliminal_detect(uids);

  for (std::size_t i = 0; i < decode_trials; ++i) {
    ++out.random_trials;
    if (!attacks::subliminal_decode(world.rng().bytes(16), secret))
      ++out.random_rejected;
  }
  return out;
}

}  // namespace epass::scenarios
