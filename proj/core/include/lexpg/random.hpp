// Copyright 2026 The lexpg Authors
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

#ifndef LEXPG_RANDOM_HPP_
#define LEXPG_RANDOM_HPP_

#include <cstdint>
#include <random>

namespace lexpg {

using Rng = std::mt19937_64;

// Independent random streams derived from one run seed. The numeric values
// are part of the reproducibility contract; do not renumber.
enum class Stream : std::uint64_t {
  kInit = 1,        // network initialisation
  kEnv = 2,         // environment resets
  kAction = 3,      // policy sampling during rollouts
  kShuffle = 4,     // minibatch permutations
  kSubproblem = 5,  // subproblem-level draws
  kEval = 6,        // evaluation rollouts
  kBench = 7,       // synthetic benchmark instances
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for `stream` under run seed `seed`: splitmix64(splitmix64(seed) ^ id).
inline std::uint64_t stream_seed(std::uint64_t seed, Stream stream) {
  return splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(stream));
}

inline Rng make_stream(std::uint64_t seed, Stream stream) {
  return Rng(stream_seed(seed, stream));
}

}  // namespace lexpg

#endif  // LEXPG_RANDOM_HPP_
