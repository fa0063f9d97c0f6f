// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "epass/dh.hpp"

#include <openssl/bn.h>

#include <algorithm>
#include <memory>

namespace epass::crypto {

namespace {

struct BnDeleter {
  void operator()(BIGNUM* b) const { BN_clear_free(b); }
  void operator()(BN_CTX* c) const { BN_CTX_free(c); }
};
using Bn = std::unique_ptr<BIGNUM, BnDeleter>;
using BnCtx = std::unique_ptr<BN_CTX, BnDeleter>;

constexpr int kFeistelRounds = 4;
constexpr std::size_t kHalf = kDhElementSize / 2;
constexpr int kMaxCycleWalk = 1 << 16;

Bn bn_new() {
  Bn b(BN_new());
  if (!b) throw Error("BN_new failed");
  return b;
}

Bn bn_from(ByteView bytes) {
  Bn b(BN_bin2bn(bytes.data(), static_cast<int>(bytes.size()), nullptr));
  if (!b) throw Error("BN_bin2bn failed");
  return b;
}

Bytes bn_bytes(const BIGNUM* b, std::size_t width) {
  Bytes out(width);
  if (BN_bn2binpad(b, out.data(), static_cast<int>(width)) < 0)
    throw Error("BN_bn2binpad failed");
  return out;
}

struct Group {
  Bn p, q, g, p_minus_1;
  Group() : p(bn_new()), q(bn_new()), g(bn_new()), p_minus_1(bn_new()) {
    BN_get_rfc3526_prime_2048(p.get());
    BN_rshift1(q.get(), p.get());  // (p - 1) / 2
    BN_set_word(g.get(), 2);
    BN_copy(p_minus_1.get(), p.get());
    BN_sub_word(p_minus_1.get(), 1);
  }
};

const Group& group() {
  static const Group g;
  return g;
}

BN_CTX* ctx() {
  thread_local BnCtx c(BN_CTX_new());
  return c.get();
}

Bn mod_exp(const BIGNUM* base, const BIGNUM* exp) {
  Bn r = bn_new();
  if (BN_mod_exp(r.get(), base, exp, group().p.get(), ctx()) != 1)
    throw Error("BN_mod_exp failed");
  return r;
}

bool in_subgroup(const BIGNUM* y) {
  Bn t = mod_exp(y, group().q.get());
  return BN_is_one(t.get());
}

/// 1 <= y <= p - 1
bool in_multiplicative_group(const BIGNUM* y) {
  return !BN_is_zero(y) && BN_cmp(y, group().p.get()) < 0;
}

// Round function of the Feistel permutation: 128 bytes of HMAC output.
void round_function(const Key16& key, int round, ByteView half,
                    std::uint8_t* out) {
  Bytes input;
  input.reserve(2 + half.size());
  for (int ctr = 0; ctr < 4; ++ctr) {
    input.assign({static_cast<std::uint8_t>(round),
                  static_cast<std::uint8_t>(ctr)});
    append(input, half);
    Digest d = hmac_sha256(key, input);
    std::copy(d.begin(), d.end(), out + 32 * ctr);
  }
}

void feistel(const Key16& key, Bytes& block, bool forward) {
  std::uint8_t f[kHalf];
  for (int i = 0; i < kFeistelRounds; ++i) {
    int round = forward ? i : kFeistelRounds - 1 - i;
    std::uint8_t* left = block.data();
    std::uint8_t* right = block.data() + kHalf;
    if (forward) {
      // (L, R) -> (R, L ^ F(R))
      round_function(key, round, ByteView(right, kHalf), f);
      for (std::size_t j = 0; j < kHalf; ++j) left[j] ^= f[j];
      std::rotate(block.begin(), block.begin() + kHalf, block.end());
    } else {
      // (L', R') = (R, L ^ F(R)) -> (L, R) = (R' ^ F(L'), L')
      round_function(key, round, ByteView(left, kHalf), f);
      for (std::size_t j = 0; j < kHalf; ++j) right[j] ^= f[j];
      std::rotate(block.begin(), block.begin() + kHalf, block.end());
    }
  }
}

// Cycle walking restricts the permutation to integers below p - 1.
Bytes walk(const Key16& key, Bytes block, bool forward) {
  for (int i = 0; i < kMaxCycleWalk; ++i) {
    feistel(key, block, forward);
    Bn v = bn_from(block);
    if (BN_cmp(v.get(), group().p_minus_1.get()) < 0) return block;
  }
  throw Error("cycle walk did not return to the domain");
}

Bn normalize_to_subgroup(Bn v) {
  // p = 3 mod 4, so exactly one of v and p - v is a quadratic residue.
  if (!in_subgroup(v.get())) {
    Bn neg = bn_new();
    BN_sub(neg.get(), group().p.get(), v.get());
    return neg;
  }
  return v;
}

Bytes masked_public(const BIGNUM* public_value, Rng& rng) {
  Bn masked = bn_new();
  BN_copy(masked.get(), public_value);
  if (rng.next() & 1) BN_sub(masked.get(), group().p.get(), public_value);
  return bn_bytes(masked.get(), kDhElementSize);
}

Key16 shared_from_message(const Key16& password, ByteView private_key,
                          ByteView message) {
  Bn peer = normalize_to_subgroup(bn_from(eke_decode(password, message)));
  return dh_shared(private_key, bn_bytes(peer.get(), kDhElementSize));
}

}  // namespace

DhKeyPair dh_keygen(Rng& rng) {
  DhKeyPair kp;
  do {
    kp.private_key = rng.bytes(kDhPrivateSize);
  } while (std::all_of(kp.private_key.begin(), kp.private_key.end(),
                       [](std::uint8_t b) { return b == 0; }));
  kp.public_key = dh_public_from_private(kp.private_key);
  return kp;
}

Bytes dh_public_from_private(ByteView private_key) {
  Bn x = bn_from(private_key);
  Bn y = mod_exp(group().g.get(), x.get());
  return bn_bytes(y.get(), kDhElementSize);
}

bool dh_is_valid_public(ByteView element) {
  if (element.size() != kDhElementSize) return false;
  Bn y = bn_from(element);
  if (BN_is_zero(y.get()) || BN_is_one(y.get())) return false;
  if (BN_cmp(y.get(), group().p_minus_1.get()) >= 0) return false;
  return in_subgroup(y.get());
}

Key16 dh_shared(ByteView private_key, ByteView peer_public) {
  if (!dh_is_valid_public(peer_public))
    throw InvalidInput("peer public value is not a valid group element");
  Bn y = bn_from(peer_public);
  Bn x = bn_from(private_key);
  Bn z = mod_exp(y.get(), x.get());
  Digest d = sha256(bn_bytes(z.get(), kDhElementSize));
  Key16 seed{};
  std::copy_n(d.begin(), seed.size(), seed.begin());
  return seed;
}

bool eke_is_group_element(ByteView element) {
  if (element.size() != kDhElementSize) return false;
  Bn v = bn_from(element);
  return in_multiplicative_group(v.get());
}

Bytes eke_encode(const Key16& password, ByteView element) {
  if (!eke_is_group_element(element))
    throw InvalidInput("EKE input is not an element of Z_p^*");
  Bn v = bn_from(element);
  BN_sub_word(v.get(), 1);
  return walk(password, bn_bytes(v.get(), kDhElementSize), true);
}

Bytes eke_decode(const Key16& password, ByteView message) {
  if (message.size() != kEkeMessageSize)
    throw ProtocolError("EKE message must be 256 bytes");
  Bn c = bn_from(message);
  if (BN_cmp(c.get(), group().p_minus_1.get()) >= 0)
    throw ProtocolError("EKE message is outside the encoding domain");
  Bytes plain = walk(password, Bytes(message.begin(), message.end()), false);
  Bn v = bn_from(plain);
  BN_add_word(v.get(), 1);
  return bn_bytes(v.get(), kDhElementSize);
}

EkeInitiation eke_initiate(const Key16& password, Rng& rng) {
  DhKeyPair kp = dh_keygen(rng);
  Bn y = bn_from(kp.public_key);
  return {kp.private_key, eke_encode(password, masked_public(y.get(), rng))};
}

EkeResponse eke_respond(const Key16& password, ByteView initiator_message,
                        Rng& rng) {
  DhKeyPair kp = dh_keygen(rng);
  Key16 seed = shared_from_message(password, kp.private_key, initiator_message);
  Bn y = bn_from(kp.public_key);
  return {session_keys(seed, 0),
          eke_encode(password, masked_public(y.get(), rng))};
}

SessionKeys eke_finish(const Key16& password, ByteView private_key,
                       ByteView responder_message) {
  return session_keys(
      shared_from_message(password, private_key, responder_message), 0);
}

}  // namespace epass::crypto
