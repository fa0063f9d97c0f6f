// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>

#include "epass/common.hpp"
#include "epass/mrz.hpp"

// Symmetric primitives, key derivation and Secure Messaging.
//
// Hash H is SHA-256, the block cipher is AES-128 and the MAC is HMAC-SHA256
// truncated to 64 bits. Only the 128-bit seed length is fixed by the
// protocol; the primitives are interchangeable.
namespace epass::crypto {

using Digest = ByteArray<32>;
using Key16 = ByteArray<16>;
using Mac8 = ByteArray<8>;
using Block16 = ByteArray<16>;

Digest sha256(ByteView data);
Digest sha256(std::initializer_list<ByteView> parts);

/// HMAC-SHA256 truncated to 8 bytes.
Mac8 mac8(const Key16& key, ByteView data);
/// Full HMAC-SHA256 with an arbitrary-length key.
Digest hmac_sha256(ByteView key, ByteView data);

/// Raw AES-128-CBC; `data` must be a multiple of 16 bytes.
Bytes aes_cbc_encrypt(const Key16& key, const Block16& iv, ByteView data);
Bytes aes_cbc_decrypt(const Key16& key, const Block16& iv, ByteView data);
Block16 aes_encrypt_block(const Key16& key, const Block16& block);

/// 128-bit access key seed derived from the MRZ information.
struct AccessKeySeed {
  Key16 seed{};
  bool operator==(const AccessKeySeed&) const = default;
};

/// seed = first 16 bytes of H(mrz_info).
AccessKeySeed derive_seed(const mrz::MrzInfo& info);
AccessKeySeed derive_seed_from_text(std::string_view mrz_info);

struct DerivedKeys {
  Key16 enc_key{};
  Key16 mac_key{};
  bool operator==(const DerivedKeys&) const = default;
};

/// enc = H(seed || 00000001)[0..16], mac = H(seed || 00000002)[0..16].
DerivedKeys derive_keys(const Key16& seed);

/// Per-session keys plus send-sequence counter. Each endpoint owns its copy.
struct SessionKeys {
  Key16 enc_key{};
  Key16 mac_key{};
  std::uint64_t ssc = 0;
  bool operator==(const SessionKeys&) const = default;
};

SessionKeys session_keys(const Key16& session_seed, std::uint64_t ssc);

/// Protected command or response: explicit counter, ciphertext and MAC over
/// (counter || ciphertext). Wire layout: ssc(8) || ciphertext || mac(8).
struct SmMessage {
  std::uint64_t ssc = 0;
  Bytes ciphertext;
  Mac8 mac{};

  Bytes encode() const;
  /// Throws ProtocolError on a malformed layout.
  static SmMessage decode(ByteView wire);
};

/// Increments keys.ssc and protects `plaintext` under the new counter.
/// Throws ProtocolError when the counter is exhausted.
SmMessage sm_wrap(SessionKeys& keys, ByteView plaintext);

/// Verifies and decrypts. IntegrityError on MAC or padding failure;
/// ReplayError when the counter is not exactly keys.ssc + 1. On success
/// keys.ssc advances to message.ssc.
Bytes sm_unwrap(SessionKeys& keys, const SmMessage& message);

// --- Basic Access Control cryptograms --------------------------------------

inline constexpr std::size_t kBacPlainSize = 32;  // rnd(8) rnd(8) k(16)
inline constexpr std::size_t kBacCryptogramSize = kBacPlainSize + 8;

/// E = AES-CBC(enc, 0, plain) followed by mac8(mac, E).
Bytes bac_seal(const DerivedKeys& keys, const ByteArray<kBacPlainSize>& plain);
/// nullopt when the MAC does not verify.
std::optional<ByteArray<kBacPlainSize>> bac_open(const DerivedKeys& keys,
                                                 ByteView cryptogram);

/// Session keys from the two key contributions: seed = k_ifd XOR k_icc,
/// ssc = rnd_icc[4..8] || rnd_ifd[4..8].
SessionKeys bac_session_keys(const Key16& k_ifd, const Key16& k_icc,
                             const ByteArray<8>& rnd_icc,
                             const ByteArray<8>& rnd_ifd);

}  // namespace epass::crypto
