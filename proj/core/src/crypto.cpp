// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "epass/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <algorithm>
#include <memory>

namespace epass::crypto {

namespace {

const EVP_MD* sha256_md() {
  static EVP_MD* md = EVP_MD_fetch(nullptr, "SHA256", nullptr);
  return md;
}

const EVP_CIPHER* aes128_cbc() {
  static EVP_CIPHER* c = EVP_CIPHER_fetch(nullptr, "AES-128-CBC", nullptr);
  return c;
}

const EVP_CIPHER* aes128_ecb() {
  static EVP_CIPHER* c = EVP_CIPHER_fetch(nullptr, "AES-128-ECB", nullptr);
  return c;
}

struct CtxDeleter {
  void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
  void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};

Bytes run_cipher(const EVP_CIPHER* cipher, const Key16& key,
                 const std::uint8_t* iv, ByteView data, bool encrypt) {
  if (data.size() % 16 != 0)
    throw InvalidInput("cipher input must be a multiple of 16 bytes");
  std::unique_ptr<EVP_CIPHER_CTX, CtxDeleter> ctx(EVP_CIPHER_CTX_new());
  if (!ctx ||
      EVP_CipherInit_ex2(ctx.get(), cipher, key.data(), iv, encrypt ? 1 : 0,
                         nullptr) != 1)
    throw Error("cipher init failed");
  EVP_CIPHER_CTX_set_padding(ctx.get(), 0);
  Bytes out(data.size());
  int len = 0;
  if (!data.empty() &&
      EVP_CipherUpdate(ctx.get(), out.data(), &len, data.data(),
                       static_cast<int>(data.size())) != 1)
    throw Error("cipher update failed");
  int tail = 0;
  if (EVP_CipherFinal_ex(ctx.get(), out.data() + len, &tail) != 1)
    throw Error("cipher final failed");
  return out;
}

Block16 ssc_block(std::uint64_t ssc) {
  Block16 b{};
  for (int i = 0; i < 8; ++i)
    b[8 + i] = static_cast<std::uint8_t>(ssc >> (56 - 8 * i));
  return b;
}

Bytes mac_input(std::uint64_t ssc, ByteView ciphertext) {
  Bytes in;
  in.reserve(8 + ciphertext.size());
  append_u64(in, ssc);
  append(in, ciphertext);
  return in;
}

// ISO/IEC 9797-1 padding method 2.
Bytes pad(ByteView plain) {
  Bytes out(plain.begin(), plain.end());
  out.push_back(0x80);
  while (out.size() % 16 != 0) out.push_back(0x00);
  return out;
}

Bytes unpad(Bytes padded) {
  while (!padded.empty() && padded.back() == 0x00) padded.pop_back();
  if (padded.empty() || padded.back() != 0x80)
    throw IntegrityError("secure messaging padding is malformed");
  padded.pop_back();
  return padded;
}

}  // namespace

Digest sha256(ByteView data) { return sha256({data}); }

Digest sha256(std::initializer_list<ByteView> parts) {
  thread_local std::unique_ptr<EVP_MD_CTX, CtxDeleter> ctx(EVP_MD_CTX_new());
  Digest out{};
  unsigned int len = 0;
  if (EVP_DigestInit_ex2(ctx.get(), sha256_md(), nullptr) != 1)
    throw Error("digest init failed");
  for (ByteView p : parts)
    if (EVP_DigestUpdate(ctx.get(), p.data(), p.size()) != 1)
      throw Error("digest update failed");
  if (EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1)
    throw Error("digest final failed");
  return out;
}

Digest hmac_sha256(ByteView key, ByteView data) {
  Digest out{};
  unsigned int len = 0;
  if (!HMAC(sha256_md(), key.data(), static_cast<int>(key.size()), data.data(),
            data.size(), out.data(), &len))
    throw Error("HMAC failed");
  return out;
}

Mac8 mac8(const Key16& key, ByteView data) {
  Digest full = hmac_sha256(key, data);
  Mac8 out{};
  std::copy_n(full.begin(), out.size(), out.begin());
  return out;
}

Bytes aes_cbc_encrypt(const Key16& key, const Block16& iv, ByteView data) {
  return run_cipher(aes128_cbc(), key, iv.data(), data, true);
}

Bytes aes_cbc_decrypt(const Key16& key, const Block16& iv, ByteView data) {
  return run_cipher(aes128_cbc(), key, iv.data(), data, false);
}

Block16 aes_encrypt_block(const Key16& key, const Block16& block) {
  Bytes out = run_cipher(aes128_ecb(), key, nullptr, block, true);
  Block16 b{};
  std::copy(out.begin(), out.end(), b.begin());
  return b;
}

AccessKeySeed derive_seed_from_text(std::string_view mrz_info) {
  Digest d = sha256(as_bytes(mrz_info));
  AccessKeySeed s;
  std::copy_n(d.begin(), s.seed.size(), s.seed.begin());
  return s;
}

AccessKeySeed derive_seed(const mrz::MrzInfo& info) {
  return derive_seed_from_text(info.value());
}

DerivedKeys derive_keys(const Key16& seed) {
  static constexpr ByteArray<4> kEncCounter{0, 0, 0, 1};
  static constexpr ByteArray<4> kMacCounter{0, 0, 0, 2};
  DerivedKeys k;
  Digest enc = sha256({seed, kEncCounter});
  Digest mac = sha256({seed, kMacCounter});
  std::copy_n(enc.begin(), 16, k.enc_key.begin());
  std::copy_n(mac.begin(), 16, k.mac_key.begin());
  return k;
}

SessionKeys session_keys(const Key16& session_seed, std::uint64_t ssc) {
  DerivedKeys d = derive_keys(session_seed);
  return {d.enc_key, d.mac_key, ssc};
}

Bytes SmMessage::encode() const {
  Bytes out;
  out.reserve(16 + ciphertext.size());
  append_u64(out, ssc);
  append(out, ciphertext);
  append(out, mac);
  return out;
}

SmMessage SmMessage::decode(ByteView wire) {
  if (wire.size() < 8 + 16 + 8 || (wire.size() - 16) % 16 != 0)
    throw ProtocolError("secure messaging frame has an invalid length");
  ByteReader r(wire);
  SmMessage m;
  m.ssc = r.u64();
  auto ct = r.take(wire.size() - 16);
  m.ciphertext.assign(ct.begin(), ct.end());
  auto mac = r.take(8);
  std::copy(mac.begin(), mac.end(), m.mac.begin());
  return m;
}

SmMessage sm_wrap(SessionKeys& keys, ByteView plaintext) {
  if (keys.ssc == UINT64_MAX)
    throw ProtocolError("send sequence counter exhausted");
  ++keys.ssc;
  SmMessage m;
  m.ssc = keys.ssc;
  Block16 iv = aes_encrypt_block(keys.enc_key, ssc_block(keys.ssc));
  m.ciphertext = aes_cbc_encrypt(keys.enc_key, iv, pad(plaintext));
  m.mac = mac8(keys.mac_key, mac_input(m.ssc, m.ciphertext));
  return m;
}

Bytes sm_unwrap(SessionKeys& keys, const SmMessage& message) {
  Mac8 expected = mac8(keys.mac_key, mac_input(message.ssc, message.ciphertext));
  if (expected != message.mac)
    throw IntegrityError("secure messaging MAC mismatch");
  if (keys.ssc == UINT64_MAX || message.ssc != keys.ssc + 1)
    throw ReplayError("secure messaging counter is stale or out of order");
  if (message.ciphertext.empty() || message.ciphertext.size() % 16 != 0)
    throw IntegrityError("secure messaging ciphertext has an invalid length");
  Block16 iv = aes_encrypt_block(keys.enc_key, ssc_block(message.ssc));
  Bytes plain = unpad(aes_cbc_decrypt(keys.enc_key, iv, message.ciphertext));
  keys.ssc = message.ssc;
  return plain;
}

Bytes bac_seal(const DerivedKeys& keys, const ByteArray<kBacPlainSize>& plain) {
  Bytes out = aes_cbc_encrypt(keys.enc_key, Block16{}, plain);
  Mac8 mac = mac8(keys.mac_key, out);
  append(out, mac);
  return out;
}

std::optional<ByteArray<kBacPlainSize>> bac_open(const DerivedKeys& keys,
                                                 ByteView cryptogram) {
  if (cryptogram.size() != kBacCryptogramSize) return std::nullopt;
  ByteView enc = cryptogram.first(kBacPlainSize);
  ByteView mac = cryptogram.subspan(kBacPlainSize);
  Mac8 expected = mac8(keys.mac_key, enc);
  if (!equal_bytes(expected, mac)) return std::nullopt;
  Bytes plain = aes_cbc_decrypt(keys.enc_key, Block16{}, enc);
  ByteArray<kBacPlainSize> out{};
  std::copy(plain.begin(), plain.end(), out.begin());
  return out;
}

SessionKeys bac_session_keys(const Key16& k_ifd, const Key16& k_icc,
                             const ByteArray<8>& rnd_icc,
                             const ByteArray<8>& rnd_ifd) {
  Key16 seed{};
  for (std::size_t i = 0; i < seed.size(); ++i) seed[i] = k_ifd[i] ^ k_icc[i];
  std::uint64_t ssc = 0;
  for (int i = 4; i < 8; ++i) ssc = ssc << 8 | rnd_icc[i];
  for (int i = 4; i < 8; ++i) ssc = ssc << 8 | rnd_ifd[i];
  return session_keys(seed, ssc);
}

}  // namespace epass::crypto
