// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <map>

#include "epass/mrz.hpp"
#include "epass/rng.hpp"
#include "test_support.hpp"

namespace epass::mrz {
namespace {

// Table-driven 7-3-1 oracle, kept deliberately separate from the library:
// every symbol's value is spelled out rather than computed from its code.
int oracle_check_digit(std::string_view field) {
  static const std::map<char, int> kValue = [] {
    std::map<char, int> m{{'<', 0}};
    const char* digits = "0123456789";
    const char* letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
    for (int i = 0; i < 10; ++i) m[digits[i]] = i;
    for (int i = 0; i < 26; ++i) m[letters[i]] = 10 + i;
    return m;
  }();
  static const int kWeight[3] = {7, 3, 1};
  int sum = 0;
  for (std::size_t i = 0; i < field.size(); ++i) sum += kValue.at(field[i]) * kWeight[i % 3];
  return sum % 10;
}

std::string random_field(Rng& rng, std::size_t length) {
  static const std::string kAlphabet = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ<";
  std::string s;
  for (std::size_t i = 0; i < length; ++i) s += kAlphabet[rng.uniform(kAlphabet.size())];
  return s;
}

Mrz sample() {
  Mrz m;
  m.issuing_state = "UTO";
  m.nationality = "UTO";
  m.holder_name = "ERIKSSON<<ANNA<MARIA";
  m.document_number = "L898902C3";
  m.birth_date = Date::from_ymd(1974, 8, 12);
  m.sex = "F";
  m.expiry_date = Date::from_ymd(2012, 4, 15);
  return m;
}

TEST(CheckDigit, AllZeroFieldIsZero) { EXPECT_EQ(check_digit("000000000"), 0); }

TEST(CheckDigit, FillerIsZero) { EXPECT_EQ(check_digit("<<<<<<<<<"), 0); }

TEST(CheckDigit, DocumentNumberMatchesOracle) {
  const int expected = oracle_check_digit("L898902C3");
  EXPECT_EQ(expected, 6);  // frozen from the oracle
  EXPECT_EQ(check_digit("L898902C3"), expected);
}

TEST(CheckDigit, MatchesOracleOnRandomFields) {
  Rng rng(31);
  for (int i = 0; i < 10000; ++i) {
    auto field = random_field(rng, 1 + rng.uniform(14));
    ASSERT_EQ(check_digit(field), oracle_check_digit(field)) << field;
  }
}

TEST(CheckDigit, RejectsLowercaseAndEmpty) {
  EXPECT_THROW(check_digit("abc"), InvalidInput);
  EXPECT_THROW(check_digit(""), InvalidInput);
}

TEST(MrzInfo, ComposesFieldsWithCheckDigits) {
  auto info = MrzInfo::from_fields("A00000000", Date::from_ymd(1974, 8, 12),
                                   Date::from_ymd(2012, 4, 15));
  std::string expected = "A00000000" + std::to_string(oracle_check_digit("A00000000")) +
                         "740812" + std::to_string(oracle_check_digit("740812")) +
                         "120415" + std::to_string(oracle_check_digit("120415"));
  EXPECT_EQ(info.value(), expected);
  EXPECT_EQ(info.value().size(), kMrzInfoLength);
}

TEST(MrzInfo, IgnoresOptionalData) {
  Mrz a = sample();
  Mrz b = sample();
  b.optional_data = "ZE184226B";
  EXPECT_EQ(mrz_info(a), mrz_info(b));
}

TEST(MrzInfo, MatchesGoldenFixture) {
  for (const auto& v : testing::crypto_vectors()["mrz"]) {
    auto info = MrzInfo::from_fields(
        pad_document_number(v["number"].get<std::string>()),
        Date::parse_yymmdd(v["birth"].get<std::string>(), true),
        Date::parse_yymmdd(v["expiry"].get<std::string>(), false));
    EXPECT_EQ(info.value(), v["mrz_info"].get<std::string>());
  }
}

TEST(MrzInfo, ParseRejectsBadCheckDigit) {
  auto good = mrz_info(sample()).value();
  EXPECT_NO_THROW(MrzInfo::parse(good));
  std::string bad = good;
  bad[9] = bad[9] == '0' ? '1' : '0';
  EXPECT_THROW(MrzInfo::parse(bad), InvalidInput);
  EXPECT_THROW(MrzInfo::parse(good.substr(1)), InvalidInput);
}

TEST(Td3, RoundTripPreservesMrzInfo) {
  Mrz m = sample();
  auto text = render_td3(m);
  EXPECT_EQ(mrz_info(parse_td3(text)), mrz_info(m));
}

TEST(Td3, RenderParseIsBijectiveOnRandomValidInputs) {
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    Mrz m = scenarios::sample_mrz(rng, Date::from_ymd(2026, 1, 1));
    m.optional_data = i % 2 ? "" : "X" + std::to_string(i);
    auto text = render_td3(m);
    auto back = parse_td3(text);
    ASSERT_EQ(back, m) << text;
    ASSERT_EQ(render_td3(back), text);
  }
}

TEST(Td3, LinesHaveFixedWidth) {
  auto text = render_td3(sample());
  auto nl = text.find('\n');
  ASSERT_NE(nl, std::string::npos);
  EXPECT_EQ(nl, kTd3LineLength);
  EXPECT_EQ(text.substr(nl + 1, kTd3LineLength).size(), kTd3LineLength);
}

TEST(Td3, ParseRejectsTamperedCheckDigit) {
  auto text = render_td3(sample());
  auto pos = text.find('\n') + 1 + 9;
  text[pos] = text[pos] == '0' ? '1' : '0';
  EXPECT_THROW(parse_td3(text), InvalidInput);
}

TEST(Validate, NamesTheOffendingField) {
  Mrz m = sample();
  m.sex = "X";
  try {
    validate(m);
    FAIL() << "accepted an invalid sex field";
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("sex"), std::string::npos);
  }
  m = sample();
  m.document_number = "TOOLONG1234";
  EXPECT_THROW(validate(m), InvalidInput);
}

}  // namespace
}  // namespace epass::mrz
