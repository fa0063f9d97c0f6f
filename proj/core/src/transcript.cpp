// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "epass/transcript.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <sstream>

namespace epass {

namespace {

constexpr std::pair<Phase, std::string_view> kPhaseNames[] = {
    {Phase::kUid, "uid"}, {Phase::kBac, "bac"},
    {Phase::kEke, "eke"}, {Phase::kSm, "sm"},
    {Phase::kEac, "eac"}, {Phase::kOnlineTa, "online-ta"},
};

}  // namespace

std::string_view to_string(Direction d) {
  return d == Direction::kChipToTerminal ? "chip->terminal" : "terminal->chip";
}

std::string_view to_string(Phase p) {
  for (auto [phase, name] : kPhaseNames)
    if (phase == p) return name;
  return "?";
}

Direction parse_direction(std::string_view s) {
  if (s == "chip->terminal") return Direction::kChipToTerminal;
  if (s == "terminal->chip") return Direction::kTerminalToChip;
  throw InvalidInput("dir: unknown direction '" + std::string(s) + "'");
}

Phase parse_phase(std::string_view s) {
  for (auto [phase, name] : kPhaseNames)
    if (name == s) return phase;
  throw InvalidInput("phase: unknown phase '" + std::string(s) + "'");
}

void Transcript::add(Direction d, Phase p, ByteView payload) {
  entries_.push_back({d, p, Bytes(payload.begin(), payload.end())});
}

std::vector<TranscriptEntry> Transcript::in_phase(Phase p) const {
  std::vector<TranscriptEntry> out;
  std::copy_if(entries_.begin(), entries_.end(), std::back_inserter(out),
               [p](const TranscriptEntry& e) { return e.phase == p; });
  return out;
}

bool Transcript::has_phase(Phase p) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [p](const TranscriptEntry& e) { return e.phase == p; });
}

std::string Transcript::to_jsonl() const {
  std::string out;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    out += "{\"seq\":" + std::to_string(i) + ",\"dir\":\"";
    out += to_string(e.direction);
    out += "\",\"phase\":\"";
    out += to_string(e.phase);
    out += "\",\"hex\":\"" + to_hex(e.payload) + "\"}\n";
  }
  return out;
}

Transcript Transcript::from_jsonl(std::string_view text) {
  Transcript t;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto where = [&](const char* field) {
      return "transcript line " + std::to_string(line_no) + ": " + field;
    };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      throw InvalidInput(where("not valid JSON"));
    }
    for (const char* field : {"seq", "dir", "phase", "hex"})
      if (!j.contains(field)) throw InvalidInput(where(field) + " missing");
    if (!j["seq"].is_number_unsigned() ||
        j["seq"].get<std::size_t>() != t.entries_.size())
      throw InvalidInput(where("seq") + " out of order");
    try {
      t.add(parse_direction(j["dir"].get<std::string>()),
            parse_phase(j["phase"].get<std::string>()),
            from_hex(j["hex"].get<std::string>()));
    } catch (const nlohmann::json::exception&) {
      throw InvalidInput(where("dir/phase/hex") + " must be strings");
    } catch (const InvalidInput& e) {
      throw InvalidInput(where(e.what()));
    }
  }
  return t;
}

}  // namespace epass
