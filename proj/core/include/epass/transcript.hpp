// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "epass/common.hpp"

namespace epass {

enum class Direction { kChipToTerminal, kTerminalToChip };

/// Protocol phase an exchanged frame belongs to, in protocol order.
enum class Phase { kUid, kBac, kEke, kSm, kEac, kOnlineTa };

std::string_view to_string(Direction d);
std::string_view to_string(Phase p);
Direction parse_direction(std::string_view s);
Phase parse_phase(std::string_view s);

struct TranscriptEntry {
  Direction direction = Direction::kChipToTerminal;
  Phase phase = Phase::kUid;
  Bytes payload;

  bool operator==(const TranscriptEntry&) const = default;
};

/// Byte-level record of one chip/terminal session as an eavesdropper sees
/// it. Serialized as JSON lines, one entry per line, keys in the fixed order
/// {"seq","dir","phase","hex"}.
class Transcript {
 public:
  void add(Direction d, Phase p, ByteView payload);

  const std::vector<TranscriptEntry>& entries() const { return entries_; }
  std::vector<TranscriptEntry> in_phase(Phase p) const;
  bool has_phase(Phase p) const;
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  std::string to_jsonl() const;
  /// Throws InvalidInput naming the offending line and field.
  static Transcript from_jsonl(std::string_view text);

  bool operator==(const Transcript&) const = default;

 private:
  std::vector<TranscriptEntry> entries_;
};

}  // namespace epass
