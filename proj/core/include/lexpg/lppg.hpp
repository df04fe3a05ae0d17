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

#ifndef LEXPG_LPPG_HPP_
#define LEXPG_LPPG_HPP_

#include <optional>
#include <vector>

#include "lexpg/projection.hpp"
#include "lexpg/random.hpp"

namespace lexpg {

/// Priority-ordered subtask gradients over one flat parameter vector.
/// Row 0 belongs to the highest-priority subtask.
class GradientStack {
 public:
  explicit GradientStack(Matrix grads);

  Eigen::Index subtasks() const { return grads_.rows(); }
  Eigen::Index dim() const { return grads_.cols(); }
  const Matrix& matrix() const { return grads_; }
  Vector row(Eigen::Index level) const;  // 1-based level

 private:
  Matrix grads_;
};

struct LppgConfig {
  // Per-subtask slack; empty means all zero.
  Vector eps;
  double dykstra_tol = kDefaultDykstraTolerance;
  int dykstra_max_iter = kDefaultDykstraMaxIter;
  // On a trivial level n, redraw uniformly from {1..n-1} instead of n-1.
  bool resample_shortcut = false;
};

struct DirectionResult {
  Vector direction;
  int sampled_level = 0;
  int used_level = 0;  // 0 iff `direction` is zero
  int fallback_steps = 0;
  ProjectionResult projection;  // diagnostics of the last Dykstra call
  int projection_calls = 0;
};

/// Half-spaces {d : g_i^T d >= -eps_i} for levels 1..n.
Cone build_cone(const GradientStack& stack, int n, const Vector& eps);

/// Projection of g_n onto the level-n cone.
ProjectionResult direction_for_level(const GradientStack& stack, int n,
                                     const LppgConfig& config);

/// Draws a subproblem depth uniformly and walks toward level 1 until a
/// nonzero feasible direction appears. `forced_level` skips the draw.
DirectionResult lppg_direction(const GradientStack& stack, Rng& rng,
                               const LppgConfig& config,
                               std::optional<int> forced_level = std::nullopt);

/// min_i 2 g_i^T d / (L_i ||d||^2) over the first L.size() levels, clamped at 0.
double stepsize_bound(const GradientStack& stack, const Vector& d,
                      const Vector& smoothness);

/// g_i^T d + eps_i for i = 1..n.
std::vector<double> first_order_check(const GradientStack& stack,
                                      const Vector& d, const Vector& eps,
                                      int n);

/// min_i slack_i / ||g_i|| over nonzero rows i <= n (+inf if none).
double min_relative_slack(const GradientStack& stack, const Vector& d,
                          const Vector& eps, int n);

}  // namespace lexpg

#endif  // LEXPG_LPPG_HPP_
