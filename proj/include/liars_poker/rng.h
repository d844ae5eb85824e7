// Copyright 2026 The Liar's Poker Lab Authors.
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

#ifndef LIARS_POKER_RNG_H_
#define LIARS_POKER_RNG_H_

#include <cstdint>
#include <random>
#include <span>

namespace liars_poker {

// SplitMix64 finalizer. Used to derive independent child seeds from a master
// seed so that every stream (deal, per-move sampling, worker) is reproducible.
inline std::uint64_t MixSeed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t a) {
  return MixSeed(seed ^ MixSeed(a));
}

inline std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b) {
  return DeriveSeed(DeriveSeed(seed, a), b);
}

// Uniform double in [0, 1) with 53 random bits; independent of the standard
// library's distribution implementations.
inline double UniformUnit(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Inverse-CDF sample from a (not necessarily normalized) non-negative weight
// vector. Returns the last positive index if rounding leaves u past the total.
inline int SampleIndex(std::span<const double> weights, double u) {
  double total = 0.0;
  for (double w : weights) total += w;
  double target = u * total;
  int last_positive = -1;
  double acc = 0.0;
  for (int i = 0; i < static_cast<int>(weights.size()); ++i) {
    if (weights[i] <= 0.0) continue;
    last_positive = i;
    acc += weights[i];
    if (target < acc) return i;
  }
  return last_positive;
}

}  // namespace liars_poker

#endif  // LIARS_POKER_RNG_H_
