/*
 * Copyright 2026 The BTDM Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BTDM_RNG_HPP
#define BTDM_RNG_HPP

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace btdm {

using Rng = std::mt19937_64;

/// splitmix64 finalizer over the pair (a, b).
constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Hierarchical seed derivation. Every labeled or indexed child is an
/// independent stream; results do not depend on evaluation order.
class SeedTree {
 public:
  constexpr explicit SeedTree(std::uint64_t seed) : value_(mix_seed(seed, 0x5eed)) {}

  constexpr SeedTree child(std::uint64_t index) const { return SeedTree(value_, index); }
  constexpr SeedTree child(std::string_view label) const { return SeedTree(value_, hash_label(label)); }

  constexpr std::uint64_t value() const { return value_; }
  Rng rng() const { return Rng(value_); }

 private:
  constexpr SeedTree(std::uint64_t parent, std::uint64_t key) : value_(mix_seed(parent, key)) {}
  std::uint64_t value_;
};

/// Circularly symmetric complex Gaussian with unit total variance.
inline std::complex<double> complex_normal(Rng& rng) {
  std::normal_distribution<double> n(0.0, 0.7071067811865476);
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

}  // namespace btdm

#endif  // BTDM_RNG_HPP
