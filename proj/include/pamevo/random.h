// Copyright 2026 The pamevo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PAMEVO_RANDOM_H_
#define PAMEVO_RANDOM_H_

#include <cstdint>
#include <random>
#include <string>

namespace pamevo {

// All stochastic components draw from this engine. libstdc++'s distributions
// are deterministic for a fixed engine state, which the run logs rely on.
using Rng = std::mt19937_64;

// splitmix64 finalizer; used for seed derivation and all content hashing.
constexpr std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t HashCombine(std::uint64_t seed, std::uint64_t value) {
  return Mix64(seed ^ (Mix64(value) + 0x632be59bd9b4e019ULL + (seed << 6) +
                       (seed >> 2)));
}

// Derives an independent stream seed from a base seed and a stream tag.
constexpr std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream) {
  return Mix64(HashCombine(Mix64(seed), stream));
}

inline bool Bernoulli(Rng& rng, double p) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

inline int UniformInt(Rng& rng, int lo, int hi_inclusive) {
  return std::uniform_int_distribution<int>(lo, hi_inclusive)(rng);
}

// Engine state as text (the standard stream representation).
std::string SerializeRng(const Rng& rng);
Rng DeserializeRng(const std::string& text);

}  // namespace pamevo

#endif  // PAMEVO_RANDOM_H_
