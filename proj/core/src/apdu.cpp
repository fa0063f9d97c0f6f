// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "epass/apdu.hpp"

namespace epass::apdu {

Bytes Command::encode() const {
  Bytes out{cla, ins, p1, p2};
  if (data.empty()) return out;
  if (data.size() <= 0xff) {
    out.push_back(static_cast<std::uint8_t>(data.size()));
  } else {
    if (data.size() > 0xffff) throw InvalidInput("command data too long");
    out.push_back(0x00);
    append_u16(out, static_cast<std::uint16_t>(data.size()));
  }
  append(out, data);
  return out;
}

std::optional<Command> Command::decode(ByteView frame) {
  if (frame.size() < 4) return std::nullopt;
  Command c{frame[0], frame[1], frame[2], frame[3], {}};
  if (frame.size() == 4) return c;
  std::size_t lc = frame[4];
  std::size_t offset = 5;
  if (lc == 0) {
    if (frame.size() < 7) return std::nullopt;
    lc = static_cast<std::size_t>(frame[5]) << 8 | frame[6];
    offset = 7;
  }
  if (lc == 0 || frame.size() != offset + lc) return std::nullopt;
  c.data.assign(frame.begin() + static_cast<std::ptrdiff_t>(offset),
                frame.end());
  return c;
}

Bytes Response::encode() const {
  Bytes out = data;
  append_u16(out, sw);
  return out;
}

Response Response::decode(ByteView frame) {
  if (frame.size() < 2) throw ProtocolError("response shorter than a status");
  Response r;
  r.data.assign(frame.begin(), frame.end() - 2);
  r.sw = static_cast<std::uint16_t>(frame[frame.size() - 2] << 8 |
                                    frame[frame.size() - 1]);
  return r;
}

}  // namespace epass::apdu
