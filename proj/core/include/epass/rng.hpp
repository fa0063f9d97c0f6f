// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

#include "epass/common.hpp"

namespace epass {

/// Seeded generator that every random decision in the lab is drawn from.
/// It is reproducible, not cryptographically strong: the lab needs replayable
/// experiments, not field-grade key material.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound).
  std::uint64_t uniform(std::uint64_t bound);

  Bytes bytes(std::size_t n);

  template <std::size_t N>
  ByteArray<N> array() {
    ByteArray<N> out{};
    fill(out);
    return out;
  }

  void fill(std::span<std::uint8_t> out);

  /// Independent child generator; consumes one draw from this one.
  Rng fork() { return Rng(next()); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace epass
