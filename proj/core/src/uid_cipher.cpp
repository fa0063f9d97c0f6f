// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "epass/uid_cipher.hpp"

#include <openssl/bn.h>

#include <algorithm>
#include <memory>

#include "epass/crypto.hpp"
#include "epass/mrz.hpp"

namespace epass::crypto {

namespace {

struct BnDeleter {
  void operator()(BIGNUM* b) const { BN_clear_free(b); }
  void operator()(BN_CTX* c) const { BN_CTX_free(c); }
};
using Bn = std::unique_ptr<BIGNUM, BnDeleter>;

Bn bn_new() {
  Bn b(BN_new());
  if (!b) throw Error("BN_new failed");
  return b;
}

Bn bn_from(ByteView bytes) {
  return Bn(BN_bin2bn(bytes.data(), static_cast<int>(bytes.size()), nullptr));
}

ByteArray<16> bn_array(const BIGNUM* b) {
  ByteArray<16> out{};
  if (BN_bn2binpad(b, out.data(), 16) < 0) throw Error("value exceeds 128 bits");
  return out;
}

BN_CTX* ctx() {
  thread_local std::unique_ptr<BN_CTX, BnDeleter> c(BN_CTX_new());
  return c.get();
}

bool is_prime(const BIGNUM* n) { return BN_check_prime(n, ctx(), nullptr) == 1; }

bool coprime_to_e(const BIGNUM* prime, std::uint32_t e) {
  Bn pm1 = bn_new();
  BN_copy(pm1.get(), prime);
  BN_sub_word(pm1.get(), 1);
  return BN_mod_word(pm1.get(), e) != 0;
}

// Next prime >= start (start is made odd) with gcd(e, prime - 1) = 1.
Bn next_prime(Bn start, std::uint32_t e) {
  if (!BN_is_odd(start.get())) BN_add_word(start.get(), 1);
  while (!is_prime(start.get()) || !coprime_to_e(start.get(), e))
    BN_add_word(start.get(), 2);
  return start;
}

constexpr std::string_view kDigits37 = "<0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";

std::uint64_t pack_number(std::string_view padded) {
  std::uint64_t v = 0;
  for (char c : padded) {
    auto pos = kDigits37.find(c);
    if (pos == std::string_view::npos)
      throw InvalidInput("document number has an invalid character");
    v = v * 37 + pos;
  }
  return v;
}

std::optional<std::string> unpack_number(std::uint64_t v) {
  std::string out(mrz::kDocumentNumberLength, '<');
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = kDigits37[v % 37];
    v /= 37;
  }
  if (v != 0) return std::nullopt;
  return out;
}

ByteArray<2> tag_of(ByteView body) {
  static constexpr std::string_view kLabel = "uid-subliminal";
  Digest d = sha256({as_bytes(kLabel), body});
  return {d[0], d[1]};
}

Bn mod_exp(const BIGNUM* base, const BIGNUM* exp, const BIGNUM* mod) {
  Bn r = bn_new();
  if (BN_mod_exp(r.get(), base, exp, mod, ctx()) != 1)
    throw Error("BN_mod_exp failed");
  return r;
}

}  // namespace

UidPrivateKey uid_keygen(Rng& rng) {
  const std::uint32_t e = 65537;
  for (;;) {
    auto seed_p = rng.array<8>();
    seed_p[0] |= 0x80;
    Bn p = next_prime(bn_from(seed_p), e);

    // q in [ceil((2^128 - 2^112) / p), floor((2^128 - 1) / p)] puts n in
    // the top 2^-16 of the 128-bit range.
    Bn lo = bn_new(), hi = bn_new(), t = bn_new(), rem = bn_new();
    BN_one(t.get());
    BN_lshift(t.get(), t.get(), 128);
    Bn small = bn_new();
    BN_one(small.get());
    BN_lshift(small.get(), small.get(), 112);
    Bn top = bn_new();
    BN_sub(top.get(), t.get(), small.get());
    BN_div(lo.get(), rem.get(), top.get(), p.get(), ctx());
    if (!BN_is_zero(rem.get())) BN_add_word(lo.get(), 1);
    BN_sub_word(t.get(), 1);
    BN_div(hi.get(), nullptr, t.get(), p.get(), ctx());

    Bn width = bn_new();
    BN_sub(width.get(), hi.get(), lo.get());
    Bn offset = bn_from(rng.array<8>());
    BN_mod(offset.get(), offset.get(), width.get(), ctx());
    Bn start = bn_new();
    BN_add(start.get(), lo.get(), offset.get());
    Bn q = next_prime(std::move(start), e);
    if (BN_cmp(q.get(), hi.get()) > 0 || BN_cmp(q.get(), p.get()) == 0)
      continue;

    Bn n = bn_new(), phi = bn_new(), pm1 = bn_new(), qm1 = bn_new();
    BN_mul(n.get(), p.get(), q.get(), ctx());
    BN_copy(pm1.get(), p.get());
    BN_sub_word(pm1.get(), 1);
    BN_copy(qm1.get(), q.get());
    BN_sub_word(qm1.get(), 1);
    BN_mul(phi.get(), pm1.get(), qm1.get(), ctx());
    Bn ebn = bn_new();
    BN_set_word(ebn.get(), e);
    Bn d(BN_mod_inverse(nullptr, ebn.get(), phi.get(), ctx()));
    if (!d) continue;

    UidPrivateKey key;
    key.public_key.modulus = bn_array(n.get());
    key.public_key.exponent = e;
    key.private_exponent = bn_array(d.get());
    return key;
  }
}

ByteArray<kSubliminalUidSize> subliminal_seal(const UidPublicKey& key,
                                              std::string_view document_number,
                                              Rng& rng) {
  std::string padded = mrz::pad_document_number(document_number);
  ByteArray<16> m{};
  std::uint64_t packed = pack_number(padded);
  for (int i = 0; i < 6; ++i)
    m[3 + i] = static_cast<std::uint8_t>(packed >> (40 - 8 * i));
  auto r = rng.array<7>();
  std::copy(r.begin(), r.end(), m.begin() + 9);
  auto tag = tag_of(ByteView(m).subspan(3));
  m[1] = tag[0];
  m[2] = tag[1];

  Bn mb = bn_from(m);
  Bn n = bn_from(key.modulus);
  Bn ebn = bn_new();
  BN_set_word(ebn.get(), key.exponent);
  return bn_array(mod_exp(mb.get(), ebn.get(), n.get()).get());
}

std::optional<std::string> subliminal_open(const UidPrivateKey& key,
                                           ByteView uid) {
  if (uid.size() != kSubliminalUidSize) return std::nullopt;
  Bn c = bn_from(uid);
  Bn n = bn_from(key.public_key.modulus);
  if (BN_cmp(c.get(), n.get()) >= 0) return std::nullopt;
  Bn d = bn_from(key.private_exponent);
  ByteArray<16> m = bn_array(mod_exp(c.get(), d.get(), n.get()).get());
  if (m[0] != 0) return std::nullopt;
  auto tag = tag_of(ByteView(m).subspan(3));
  if (m[1] != tag[0] || m[2] != tag[1]) return std::nullopt;
  std::uint64_t packed = 0;
  for (int i = 0; i < 6; ++i) packed = packed << 8 | m[3 + i];
  return unpack_number(packed);
}

}  // namespace epass::crypto
