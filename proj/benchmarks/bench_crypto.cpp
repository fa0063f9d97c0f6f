// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "epass/crypto.hpp"
#include "epass/mrz.hpp"

namespace {

using namespace epass;

void BM_CheckDigit(benchmark::State& state) {
  const std::string field = "L898902C3";
  for (auto _ : state) benchmark::DoNotOptimize(mrz::check_digit(field));
}
BENCHMARK(BM_CheckDigit);

void BM_DeriveSeed(benchmark::State& state) {
  auto info = mrz::MrzInfo::from_fields("L898902C3", Date::from_ymd(1974, 8, 12),
                                        Date::from_ymd(2031, 4, 15));
  for (auto _ : state) benchmark::DoNotOptimize(crypto::derive_seed(info));
}
BENCHMARK(BM_DeriveSeed);

void BM_DeriveKeys(benchmark::State& state) {
  auto info = mrz::MrzInfo::from_fields("L898902C3", Date::from_ymd(1974, 8, 12),
                                        Date::from_ymd(2031, 4, 15));
  auto seed = crypto::derive_seed(info).seed;
  for (auto _ : state) benchmark::DoNotOptimize(crypto::derive_keys(seed));
}
BENCHMARK(BM_DeriveKeys);

}  // namespace
