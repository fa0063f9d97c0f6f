// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace epass {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

template <std::size_t N>
using ByteArray = std::array<std::uint8_t, N>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (bad characters, bad lengths...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Secure-messaging MAC mismatch or corrupted protected data.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

/// A protected message carried a stale or duplicate send-sequence counter.
class ReplayError : public Error {
 public:
  using Error::Error;
};

/// Structurally malformed protocol message.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// A candidate space exceeded the configured enumeration cap.
class SpaceTooLarge : public Error {
 public:
  SpaceTooLarge(double size_bits, double cap_bits);

  double size_bits() const { return size_bits_; }
  double cap_bits() const { return cap_bits_; }

 private:
  double size_bits_;
  double cap_bits_;
};

std::string to_hex(ByteView data);
Bytes from_hex(std::string_view hex);

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline void append(Bytes& out, ByteView data) {
  if (data.empty()) return;
  const std::size_t at = out.size();
  out.resize(at + data.size());
  std::memcpy(out.data() + at, data.data(), data.size());
}

void append_u16(Bytes& out, std::uint16_t v);
void append_u32(Bytes& out, std::uint32_t v);
void append_u64(Bytes& out, std::uint64_t v);

/// Cursor over a byte buffer used by the canonical decoders. Every read
/// throws ProtocolError on truncation.
class ByteReader {
 public:
  explicit ByteReader(ByteView data) : data_(data) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  ByteView take(std::size_t n);
  /// u16 length prefix followed by that many bytes.
  ByteView take_prefixed();

  bool empty() const { return pos_ == data_.size(); }
  std::size_t remaining() const { return data_.size() - pos_; }
  void expect_end() const;

 private:
  ByteView data_;
  std::size_t pos_ = 0;
};

/// Constant-size comparison helper; not constant time.
bool equal_bytes(ByteView a, ByteView b);

}  // namespace epass
