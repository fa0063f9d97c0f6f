// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "epass/mrz.hpp"

#include <algorithm>

#include "epass/common.hpp"

namespace epass::mrz {

namespace {

constexpr int kWeights[3] = {7, 3, 1};

int char_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'Z') return c - 'A' + 10;
  if (c == '<') return 0;
  return -1;
}

bool is_mrz_char(char c) { return char_value(c) >= 0; }

bool is_alnum(char c) {
  return (c >= '0' && c <= '9') || (c >= 'A' && c <= 'Z');
}

char digit_char(int d) { return static_cast<char>('0' + d); }

std::string pad(std::string_view s, std::size_t width) {
  std::string out(s);
  out.resize(width, '<');
  return out;
}

std::string trim_filler(std::string_view s) {
  auto end = s.find_last_not_of('<');
  return end == std::string_view::npos ? std::string()
                                       : std::string(s.substr(0, end + 1));
}

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw InvalidInput(std::string(field) + ": " + what);
}

void require_chars(std::string_view s, const char* field) {
  require(std::all_of(s.begin(), s.end(), is_mrz_char), field,
          "characters must be A-Z, 0-9 or '<'");
}

void require_canonical(std::string_view s, std::size_t width,
                       const char* field) {
  require(s.size() <= width, field, "too long");
  require_chars(s, field);
  require(s.empty() || s.back() != '<', field, "must not end with filler");
}

void require_digit(std::string_view field_text, char stored,
                   const char* field) {
  require(stored == digit_char(check_digit(field_text)), field,
          "check digit mismatch");
}

}  // namespace

int check_digit(std::string_view field) {
  if (field.empty()) throw InvalidInput("check_digit: empty field");
  int sum = 0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    int v = char_value(field[i]);
    if (v < 0) throw InvalidInput("check_digit: invalid character");
    sum += v * kWeights[i % 3];
  }
  return sum % 10;
}

std::string pad_document_number(std::string_view number) {
  require(!number.empty(), "document_number", "empty");
  require(number.size() <= kDocumentNumberLength, "document_number",
          "longer than 9 characters");
  require(std::all_of(number.begin(), number.end(), is_alnum),
          "document_number", "characters must be A-Z or 0-9");
  return pad(number, kDocumentNumberLength);
}

void validate(const Mrz& mrz) {
  pad_document_number(mrz.document_number);
  require(mrz.document_code.size() >= 1 && mrz.document_code.size() <= 2 &&
              mrz.document_code[0] == 'P',
          "document_code", "TD3 documents start with 'P'");
  require_canonical(mrz.document_code, 2, "document_code");
  require(mrz.issuing_state.size() == 3, "issuing_state", "needs 3 characters");
  require_chars(mrz.issuing_state, "issuing_state");
  require(mrz.nationality.size() == 3, "nationality", "needs 3 characters");
  require_chars(mrz.nationality, "nationality");
  require(mrz.sex == "M" || mrz.sex == "F" || mrz.sex == "<", "sex",
          "must be M, F or <");
  require_canonical(mrz.holder_name, 39, "holder_name");
  require_canonical(mrz.optional_data, 14, "optional_data");
  require(mrz.birth_date.year() >= 1930 && mrz.birth_date.year() <= 2029,
          "birth_date", "outside the 1930-2029 century window");
  require(mrz.expiry_date.year() >= 2000 && mrz.expiry_date.year() <= 2099,
          "expiry_date", "outside the 2000-2099 century window");
  require(mrz.birth_date < mrz.expiry_date, "expiry_date",
          "must be after birth_date");
}

MrzInfo MrzInfo::from_fields(std::string_view padded_number, Date birth,
                             Date expiry) {
  if (padded_number.size() != kDocumentNumberLength)
    throw InvalidInput("MrzInfo: document number must be padded to 9");
  std::string v;
  v.reserve(kMrzInfoLength);
  v.append(padded_number);
  v.push_back(digit_char(check_digit(padded_number)));
  std::string b = birth.yymmdd();
  v.append(b);
  v.push_back(digit_char(check_digit(b)));
  std::string e = expiry.yymmdd();
  v.append(e);
  v.push_back(digit_char(check_digit(e)));
  return MrzInfo(std::move(v));
}

MrzInfo MrzInfo::parse(std::string_view text) {
  require(text.size() == kMrzInfoLength, "mrz_info", "must be 24 characters");
  require_chars(text, "mrz_info");
  require_digit(text.substr(0, 9), text[9], "mrz_info.document_number");
  require_digit(text.substr(10, 6), text[16], "mrz_info.birth_date");
  require_digit(text.substr(17, 6), text[23], "mrz_info.expiry_date");
  Date::parse_yymmdd(text.substr(10, 6), true);
  Date::parse_yymmdd(text.substr(17, 6), false);
  return MrzInfo(std::string(text));
}

MrzInfo mrz_info(const Mrz& mrz) {
  validate(mrz);
  return MrzInfo::from_fields(pad_document_number(mrz.document_number),
                              mrz.birth_date, mrz.expiry_date);
}

std::string render_td3(const Mrz& mrz) {
  validate(mrz);
  std::string line1 = pad(mrz.document_code, 2) + mrz.issuing_state +
                      pad(mrz.holder_name, 39);

  std::string number = pad_document_number(mrz.document_number);
  std::string birth = mrz.birth_date.yymmdd();
  std::string expiry = mrz.expiry_date.yymmdd();
  std::string optional = pad(mrz.optional_data, 14);

  std::string line2;
  line2 += number;
  line2 += digit_char(check_digit(number));
  line2 += mrz.nationality;
  line2 += birth;
  line2 += digit_char(check_digit(birth));
  line2 += mrz.sex;
  line2 += expiry;
  line2 += digit_char(check_digit(expiry));
  line2 += optional;
  line2 += digit_char(check_digit(optional));
  std::string composite = line2.substr(0, 10) + line2.substr(13, 7) +
                          line2.substr(21, 22);
  line2 += digit_char(check_digit(composite));
  return line1 + "\n" + line2;
}

Mrz parse_td3(std::string_view text) {
  std::string joined;
  for (char c : text)
    if (c != '\n' && c != '\r') joined.push_back(c);
  require(joined.size() == 2 * kTd3LineLength, "mrz",
          "TD3 needs two 44-character lines");
  require_chars(joined, "mrz");
  std::string_view line1 = std::string_view(joined).substr(0, 44);
  std::string_view line2 = std::string_view(joined).substr(44, 44);

  Mrz mrz;
  mrz.document_code = trim_filler(line1.substr(0, 2));
  mrz.issuing_state = std::string(line1.substr(2, 3));
  mrz.holder_name = trim_filler(line1.substr(5, 39));

  require_digit(line2.substr(0, 9), line2[9], "document_number");
  require_digit(line2.substr(13, 6), line2[19], "birth_date");
  require_digit(line2.substr(21, 6), line2[27], "expiry_date");
  require_digit(line2.substr(28, 14), line2[42], "optional_data");
  std::string composite = std::string(line2.substr(0, 10)) +
                          std::string(line2.substr(13, 7)) +
                          std::string(line2.substr(21, 22));
  require_digit(composite, line2[43], "composite");

  mrz.document_number = trim_filler(line2.substr(0, 9));
  mrz.nationality = std::string(line2.substr(10, 3));
  mrz.birth_date = Date::parse_yymmdd(line2.substr(13, 6), true);
  mrz.sex = std::string(line2.substr(20, 1));
  mrz.expiry_date = Date::parse_yymmdd(line2.substr(21, 6), false);
  mrz.optional_data = trim_filler(line2.substr(28, 14));
  validate(mrz);
  return mrz;
}

}  // namespace epass::mrz
