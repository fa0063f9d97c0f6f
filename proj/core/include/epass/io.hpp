// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "epass/chip.hpp"
#include "epass/entropy.hpp"
#include "epass/pki.hpp"

// JSON file formats shared by the command line tool and the tests. Every
// parser throws InvalidInput whose message starts with the offending field.
namespace epass::io {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// {mrz, country, current_date, profile, uid_policy, data_groups,
///  security_object, keys}
std::string personalization_to_json(const chip::Personalization& p);
chip::Personalization personalization_from_json(std::string_view text);

/// Private key material of one country.
std::string country_to_json(const pki::CountryPki& country);
pki::CountryPki country_from_json(std::string_view text);

/// Array of {hex, subject_id, issuer_id, role, rights, effective_date,
/// expiry_date}; only "hex" is read back, the rest is for humans.
std::string certificates_to_json(std::span<const pki::CvCertificate> certs);
std::vector<pki::CvCertificate> certificates_from_json(std::string_view text);

/// {id, role, rights, seed}: a certificate holder's signing key.
struct KeyFile {
  std::string id;
  pki::Role role = pki::Role::kInspectionSystem;
  DgSet rights;
  crypto::SignatureKeyPair key;

  pki::Issuer issuer() const { return {id, key, role, rights}; }
};
std::string key_to_json(const KeyFile& key);
KeyFile key_from_json(std::string_view text);

struct PolicyFile {
  mrz::IssuancePolicy policy;
  mrz::AttackerAssumptions assumptions;
};
/// Issuance policy plus an optional "attacker" object.
PolicyFile policy_from_json(std::string_view text);
std::string policy_to_json(const PolicyFile& file);

}  // namespace epass::io
