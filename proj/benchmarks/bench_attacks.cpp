// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "epass/attacks.hpp"
#include "epass/scenarios.hpp"

namespace {

using namespace epass;

const scenarios::RecordedSession& recorded() {
  static scenarios::World world(7);
  static auto session = scenarios::record_session(world, false);
  return session;
}

void BM_CandidateMatch(benchmark::State& state) {
  auto obs = attacks::extract_observation(recorded().transcript);
  auto wrong = mrz::MrzInfo::from_fields("P00000000", Date::from_ymd(1980, 1, 1),
                                         Date::from_ymd(2030, 1, 1));
  for (auto _ : state) benchmark::DoNotOptimize(attacks::candidate_matches(obs, wrong));
}
BENCHMARK(BM_CandidateMatch);

// Candidates per second over a 2^16 neighborhood, by worker count.
void BM_OfflineSearch(benchmark::State& state) {
  Rng rng(3);
  auto space = attacks::neighborhood_space(recorded().mrz, scenarios::demo_numbering(), 12, 4,
                                           rng);
  auto workers = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    auto r = attacks::offline_search(recorded().transcript, space, workers);
    benchmark::DoNotOptimize(r.survivors.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(space.count()));
}
BENCHMARK(BM_OfflineSearch)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(
    benchmark::kMillisecond);

}  // namespace
