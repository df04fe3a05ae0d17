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

#ifndef LEXPG_NAV2D_HPP_
#define LEXPG_NAV2D_HPP_

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "lexpg/env.hpp"

namespace lexpg::nav2d {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

using Polygon = std::vector<Point>;

/// Boundary points count as inside. Throws on fewer than three vertices or
/// zero area.
bool point_in_polygon(Point p, const Polygon& poly);

/// Smallest Euclidean distance from p to any vertex of poly.
double min_vertex_distance(Point p, const Polygon& poly);

// How the off-goal distance penalty scales with lambda.
enum class GoalPenalty {
  kDivisor,     // -d^2 / lambda
  kMultiplier,  // -lambda * d^2
};

struct Goal {
  Point center;
  double radius = 0.5;
  int rank = 0;  // 0 = most important goal
  std::string name;
};

inline constexpr int kMaxGoals = 128;

struct MapSpec {
  double lo = 0.0;
  double hi = 10.0;
  Polygon obstacle{{3.0, 7.5}, {4.0, 8.5}, {8.5, 4.0}, {7.5, 3.0}};
  // Observation order; reward order follows `rank`.
  std::vector<Goal> goals;
  double v_max = 0.5;
  int episode_limit = 100;
  Point start_mean{1.0, 1.0};
  double start_std = 0.5;
  double start_clamp_lo = 0.01;
  double start_clamp_hi = 9.99;
  double goal_reward = 10.0;
  double lambda = 100.0;
  GoalPenalty goal_penalty = GoalPenalty::kDivisor;
  // Sign applied to the squared vertex distance while inside the obstacle.
  double obstacle_sign = -1.0;
};

struct EnvState {
  Point position;
  int t = 0;
  std::vector<bool> goal_flags;
  bool finished = false;
};

enum class VariantKind { kOneGoal, kTwoGoals, kTwoGoalsReversed, kNGoals };

struct Variant {
  VariantKind kind = VariantKind::kOneGoal;
  int goals = 1;  // NGoals only

  /// nav2d-1g, nav2d-2g, nav2d-2g-rev, nav2d-<n>g.
  std::string name() const;
  static Variant parse(const std::string& text);
  static Variant n_goals(int n);
};

/// Centres for the n-goal generator.
std::vector<Point> ngoal_centers(int n);

MapSpec make_map(const Variant& variant);

class Nav2DEnv final : public Environment {
 public:
  Nav2DEnv(MapSpec map, std::string name);

  std::string name() const override { return name_; }
  int observation_dim() const override;
  int action_dim() const override { return 2; }
  int subtasks() const override;
  std::vector<std::string> subtask_names() const override;

  Vector reset(Rng& rng) override;
  StepResult step(const Vector& action) override;
  std::unique_ptr<Environment> clone() const override;

  const MapSpec& map() const { return map_; }
  const EnvState& state() const { return state_; }
  /// Places the agent directly; used by tests and evaluation tooling.
  void set_state(EnvState state);
  Vector observation() const;

 private:
  Vector rewards(const StepInfo& info) const;

  MapSpec map_;
  std::string name_;
  std::vector<std::size_t> by_rank_;  // goal indices in reward order
  EnvState state_;
};

std::unique_ptr<Nav2DEnv> make_nav2d(const Variant& variant);

struct TrajectoryRow {
  int episode = 0;
  int t = 0;
  double x = 0.0;
  double y = 0.0;
  double action_x = 0.0;
  double action_y = 0.0;
  Vector rewards;
  bool done = false;
};

void write_trajectory_header(std::ostream& out, int subtasks);
void write_trajectory_row(std::ostream& out, const TrajectoryRow& row);

}  // namespace lexpg::nav2d

#endif  // LEXPG_NAV2D_HPP_
