// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "epass/common.hpp"
#include "epass/crypto.hpp"
#include "epass/rng.hpp"

// Finite-field Diffie-Hellman over the 2048-bit MODP group of RFC 3526
// (p = 2q + 1 safe prime, generator 2 of the order-q subgroup), and the
// encrypted key exchange built on it.
namespace epass::crypto {

inline constexpr std::size_t kDhElementSize = 256;
inline constexpr std::size_t kDhPrivateSize = 32;

struct DhKeyPair {
  Bytes private_key;  // 32-byte big-endian exponent
  Bytes public_key;   // 256-byte big-endian element
};

DhKeyPair dh_keygen(Rng& rng);
Bytes dh_public_from_private(ByteView private_key);

/// 1 < y < p - 1 and y lies in the order-q subgroup.
bool dh_is_valid_public(ByteView element);

/// H(peer^private mod p)[0..16]. Throws InvalidInput for a peer element
/// outside the prime-order subgroup (including 0, 1 and p - 1).
Key16 dh_shared(ByteView private_key, ByteView peer_public);

// --- Encrypted key exchange --------------------------------------------------
//
// Each side masks its ephemeral public value with a random sign and encrypts
// it under the password key with a cycle-walking Feistel permutation of
// [1, p - 1]. Any 256-byte message in that range decrypts, under any key, to
// a member of Z_p^*, so a transcript admits no offline password test.

inline constexpr std::size_t kEkeMessageSize = kDhElementSize;

/// Encrypts a Z_p^* element (1 <= v <= p - 1) under the password key.
Bytes eke_encode(const Key16& password, ByteView element);
/// Inverse of eke_encode. Throws ProtocolError unless `message` is a
/// 256-byte encoding of a value in [1, p - 1].
Bytes eke_decode(const Key16& password, ByteView message);
/// The validity predicate an offline attacker can evaluate: does the
/// 256-byte string encode an element of Z_p^*?
bool eke_is_group_element(ByteView element);

struct EkeInitiation {
  Bytes private_key;
  Bytes message;
};

struct EkeResponse {
  SessionKeys keys;
  Bytes message;
};

EkeInitiation eke_initiate(const Key16& password, Rng& rng);
EkeResponse eke_respond(const Key16& password, ByteView initiator_message,
                        Rng& rng);
SessionKeys eke_finish(const Key16& password, ByteView private_key,
                       ByteView responder_message);

}  // namespace epass::crypto
