// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>

#include "epass/common.hpp"

// Command/response framing between terminal and chip. The full command
// table lives in docs/command-set.md.
namespace epass::apdu {

// Status words.
inline constexpr std::uint16_t kSwOk = 0x9000;
inline constexpr std::uint16_t kSwAuthFailed = 0x6300;
inline constexpr std::uint16_t kSwWrongLength = 0x6700;
inline constexpr std::uint16_t kSwSecurityNotSatisfied = 0x6982;
inline constexpr std::uint16_t kSwConditionsNotSatisfied = 0x6985;
inline constexpr std::uint16_t kSwSmMissing = 0x6987;
inline constexpr std::uint16_t kSwSmIncorrect = 0x6988;
inline constexpr std::uint16_t kSwWrongData = 0x6A80;
inline constexpr std::uint16_t kSwFileNotFound = 0x6A82;
inline constexpr std::uint16_t kSwInsNotSupported = 0x6D00;
inline constexpr std::uint16_t kSwClassNotSupported = 0x6E00;
inline constexpr std::uint16_t kSwNoPreciseDiagnosis = 0x6F00;

// Classes.
inline constexpr std::uint8_t kClaPlain = 0x00;
inline constexpr std::uint8_t kClaProtected = 0x0C;

// Outer (unprotected) instructions.
inline constexpr std::uint8_t kInsSelect = 0xA4;
inline constexpr std::uint8_t kInsGetChallenge = 0x84;
inline constexpr std::uint8_t kInsMutualAuthenticate = 0x82;
inline constexpr std::uint8_t kInsGeneralAuthenticate = 0x86;  // EKE
inline constexpr std::uint8_t kInsReadBinary = 0xB0;
inline constexpr std::uint8_t kInsEnvelope = 0xC2;  // CLA 0C, data = SM frame

// Inner instructions, carried inside secure messaging.
inline constexpr std::uint8_t kInsReadDataGroup = 0xB0;  // P1 = DG, 0 = SO_D
inline constexpr std::uint8_t kInsInternalAuthenticate = 0x88;  // AA
inline constexpr std::uint8_t kInsSetKeyAgreement = 0x22;       // chip auth
inline constexpr std::uint8_t kInsVerifyCertificate = 0x2A;     // TA chain
inline constexpr std::uint8_t kInsTaGetChallenge = 0x84;
inline constexpr std::uint8_t kInsTaExternalAuthenticate = 0x82;
inline constexpr std::uint8_t kInsOnlineTaBegin = 0xE0;
inline constexpr std::uint8_t kInsOnlineTaProve = 0xE2;
inline constexpr std::uint8_t kInsOnlineTaComplete = 0xE4;

/// eMRTD application identifier.
inline constexpr std::uint8_t kMrtdAid[] = {0xA0, 0x00, 0x00, 0x02,
                                            0x47, 0x10, 0x01};

struct Command {
  std::uint8_t cla = kClaPlain;
  std::uint8_t ins = 0;
  std::uint8_t p1 = 0;
  std::uint8_t p2 = 0;
  Bytes data;

  /// CLA INS P1 P2 [Lc data]. Lc is one byte for 1..255 bytes of data and
  /// 00 hi lo (extended) above that.
  Bytes encode() const;
  /// nullopt when the frame is shorter than a header or Lc disagrees with
  /// the remaining length.
  static std::optional<Command> decode(ByteView frame);
};

struct Response {
  Bytes data;
  std::uint16_t sw = kSwOk;

  bool ok() const { return sw == kSwOk; }
  /// data || SW1 SW2
  Bytes encode() const;
  /// Throws ProtocolError when shorter than two bytes.
  static Response decode(ByteView frame);
};

}  // namespace epass::apdu
