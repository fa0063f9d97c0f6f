// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "epass/common.hpp"
#include "epass/rng.hpp"

namespace epass::crypto {

inline constexpr std::size_t kVerifyKeySize = 32;
inline constexpr std::size_t kSignatureSize = 64;

using VerifyKey = ByteArray<kVerifyKeySize>;

/// Ed25519 key pair. The private half is the 32-byte seed.
struct SignatureKeyPair {
  ByteArray<32> private_seed{};
  VerifyKey public_key{};
};

SignatureKeyPair signature_keygen(Rng& rng);
SignatureKeyPair signature_from_seed(const ByteArray<32>& seed);

Bytes sign(const SignatureKeyPair& key, ByteView message);

/// False for a wrong key, modified message or malformed signature; never
/// throws.
bool verify(ByteView public_key, ByteView message, ByteView signature);

}  // namespace epass::crypto
