// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>

#include "epass/common.hpp"
#include "epass/rng.hpp"

// Public-key encryption sized to a 16-byte anti-collision identifier, used
// to plant a covert channel in the UID. Textbook RSA over a 128-bit modulus
// whose top 16 bits are set, with a randomized plaintext layout:
//
//   0x00 | tag(2) | document number, base 37 (6) | r (7)
//
// The modulus is far too short for real confidentiality; it is sized so the
// ciphertext fits the identifier and looks uniform on the air.
namespace epass::crypto {

inline constexpr std::size_t kSubliminalUidSize = 16;

struct UidPublicKey {
  ByteArray<16> modulus{};
  std::uint32_t exponent = 65537;
  bool operator==(const UidPublicKey&) const = default;
};

struct UidPrivateKey {
  UidPublicKey public_key;
  ByteArray<16> private_exponent{};
};

UidPrivateKey uid_keygen(Rng& rng);

/// Encrypts (r, document_number) into a 16-byte identifier.
ByteArray<kSubliminalUidSize> subliminal_seal(const UidPublicKey& key,
                                              std::string_view document_number,
                                              Rng& rng);

/// Recovers the padded document number, or nullopt when the redundancy
/// check fails (wrong key, or an identifier that carries no message).
std::optional<std::string> subliminal_open(const UidPrivateKey& key,
                                           ByteView uid);

}  // namespace epass::crypto
