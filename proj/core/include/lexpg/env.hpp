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

#ifndef LEXPG_ENV_HPP_
#define LEXPG_ENV_HPP_

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "lexpg/projection.hpp"
#include "lexpg/random.hpp"

namespace lexpg {

class InvalidStateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct StepInfo {
  bool in_bounds = true;
  bool in_obstacle = false;
  double obstacle_vertex_distance = 0.0;
  std::vector<double> goal_distances;
};

struct StepResult {
  Vector observation;
  Vector rewards;  // one entry per subtask, highest priority first
  bool done = false;       // true termination
  bool truncated = false;  // cut by the step limit
  StepInfo info;
};

/// Episodic environment emitting one reward per prioritised subtask.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string name() const = 0;
  virtual int observation_dim() const = 0;
  virtual int action_dim() const = 0;
  virtual int subtasks() const = 0;
  virtual std::vector<std::string> subtask_names() const = 0;

  virtual Vector reset(Rng& rng) = 0;
  /// Throws InvalidStateError once the episode has ended.
  virtual StepResult step(const Vector& action) = 0;
  virtual std::unique_ptr<Environment> clone() const = 0;
};

}  // namespace lexpg

#endif  // LEXPG_ENV_HPP_
