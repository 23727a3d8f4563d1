/*
 * Copyright 2026 The DriftAlign Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Portable seeded random stream used by the synthetic generator. The exact
// algorithm is part of the fixture contract, so it is spelled out here and in
// the README rather than delegated to <random> distributions, whose outputs
// differ between standard libraries.
//
//   Seeding:   SplitMix64. state += 0x9E3779B97F4A7C15;
//              z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
//              z = (z ^ (z >> 27)) * 0x94D049BB133111EB; z ^= z >> 31.
//              Four consecutive outputs seed s[0..3].
//   Stream:    xoshiro256**. result = rotl(s[1] * 5, 7) * 9;
//              t = s[1] << 17; s[2] ^= s[0]; s[3] ^= s[1]; s[1] ^= s[2];
//              s[0] ^= s[3]; s[2] ^= t; s[3] = rotl(s[3], 45).
//   Uniform:   (next() >> 11) * 2^-53, in [0, 1).
//   Gaussian:  u1 = 1 - Uniform(), u2 = Uniform();
//              z = sqrt(-2 ln u1) * cos(2 pi u2). The sine branch is
//              discarded, so each normal draw consumes two 64-bit outputs.

#ifndef DRIFTALIGN_RANDOM_H_
#define DRIFTALIGN_RANDOM_H_

#include <array>
#include <cstdint>
#include <string_view>

namespace driftalign {

inline constexpr std::string_view kRngAlgorithm =
    "xoshiro256starstar+splitmix64+boxmuller-cos/v1";

std::uint64_t SplitMix64Next(std::uint64_t& state);

class Xoshiro256StarStar {
 public:
  explicit Xoshiro256StarStar(std::uint64_t seed);

  std::uint64_t Next();
  double Uniform();
  double Gaussian();

 private:
  std::array<std::uint64_t, 4> s_;
};

}  // namespace driftalign

#endif  // DRIFTALIGN_RANDOM_H_
