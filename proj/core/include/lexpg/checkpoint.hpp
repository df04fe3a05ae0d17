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

#ifndef LEXPG_CHECKPOINT_HPP_
#define LEXPG_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lexpg/nnet.hpp"

namespace lexpg {

inline constexpr char kCheckpointMagic[8] = {'L', 'E', 'X', 'P', 'G', 'C', 'K', 'P'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

// Binary layout, all integers and floats little-endian:
//
//   magic "LEXPGCKP"                  8 bytes
//   u32 version (= 1)
//   u32 state_dim, u32 action_dim, u32 subtasks, u32 activation (0 = tanh)
//   u32 n_actor_hidden,  u32 width[n_actor_hidden]
//   u32 n_critic_hidden, u32 width[n_critic_hidden]
//   u32 variant length, variant bytes (no terminator)
//   u64 seed, u64 env steps trained
//   u64 actor param count, u64 critic param count
//   f64 actor params, f64 critic params
struct Checkpoint {
  std::string env_variant;
  int state_dim = 0;
  int action_dim = 0;
  int subtasks = 0;
  Activation activation = Activation::kTanh;
  std::vector<int> actor_hidden{64, 64, 64};
  std::vector<int> critic_hidden{64, 64, 64};
  std::uint64_t seed = 0;
  std::uint64_t steps = 0;
  Vector actor;
  Vector critic;

  bool operator==(const Checkpoint&) const;
};

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt);
/// Throws std::runtime_error on malformed input.
Checkpoint deserialize_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// 64-bit FNV-1a over the raw little-endian bytes of `values`.
std::uint64_t content_hash(const Vector& values);

}  // namespace lexpg

#endif  // LEXPG_CHECKPOINT_HPP_
