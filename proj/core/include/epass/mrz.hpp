// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <string>
#include <string_view>

#include "epass/date.hpp"

namespace epass::mrz {

inline constexpr std::size_t kDocumentNumberLength = 9;
inline constexpr std::size_t kMrzInfoLength = 24;
inline constexpr std::size_t kTd3LineLength = 44;

/// ICAO 7-3-1 check digit. Throws InvalidInput on an empty field or a
/// character outside [A-Z0-9<].
int check_digit(std::string_view field);

/// Right-pads with '<' to nine characters; throws InvalidInput when the
/// number is empty, longer than nine characters or not [A-Z0-9].
std::string pad_document_number(std::string_view number);

/// Machine readable zone of a TD3 (passport) data page. Text fields are
/// stored without trailing '<' filler.
struct Mrz {
  std::string document_code = "P";
  std::string issuing_state;
  std::string holder_name;  // MRZ name field, e.g. "ERIKSSON<<ANNA<MARIA"
  std::string document_number;
  std::string nationality;
  Date birth_date;
  std::string sex;  // "M", "F" or "<"
  Date expiry_date;
  std::string optional_data;  // at most 14 characters; not part of MrzInfo

  bool operator==(const Mrz&) const = default;
};

/// Throws InvalidInput naming the first violated field.
void validate(const Mrz& mrz);

/// The 24-character string that seeds the access key:
/// number(9) cd birth(6) cd expiry(6) cd.
class MrzInfo {
 public:
  /// `padded_number` must already be nine characters.
  static MrzInfo from_fields(std::string_view padded_number, Date birth,
                             Date expiry);
  /// Validates length and the three embedded check digits.
  static MrzInfo parse(std::string_view text);

  const std::string& value() const { return value_; }
  std::string_view document_number() const {
    return std::string_view(value_).substr(0, 9);
  }
  std::string_view birth_yymmdd() const {
    return std::string_view(value_).substr(10, 6);
  }
  std::string_view expiry_yymmdd() const {
    return std::string_view(value_).substr(17, 6);
  }

  auto operator<=>(const MrzInfo&) const = default;

 private:
  explicit MrzInfo(std::string v) : value_(std::move(v)) {}
  std::string value_;
};

MrzInfo mrz_info(const Mrz& mrz);

/// Two 44-character lines joined by '\n'.
std::string render_td3(const Mrz& mrz);
/// Accepts the two lines separated by a newline or concatenated (88 chars).
/// Every check digit is verified.
Mrz parse_td3(std::string_view text);

}  // namespace epass::mrz
