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

#include "lexpg/nav2d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace lexpg::nav2d {

namespace {

double cross(Point o, Point a, Point b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

void check_polygon(const Polygon& poly) {
  if (poly.size() < 3) throw std::invalid_argument("polygon needs at least three vertices");
  double area2 = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point a = poly[i];
    const Point b = poly[(i + 1) % poly.size()];
    area2 += a.x * b.y - b.x * a.y;
  }
  if (std::abs(area2) < 1e-12) throw std::invalid_argument("polygon has zero area");
}

bool on_segment(Point p, Point a, Point b) {
  const double len = std::hypot(b.x - a.x, b.y - a.y);
  if (std::abs(cross(a, b, p)) > 1e-12 * std::max(1.0, len)) return false;
  return p.x >= std::min(a.x, b.x) - 1e-12 && p.x <= std::max(a.x, b.x) + 1e-12 &&
         p.y >= std::min(a.y, b.y) - 1e-12 && p.y <= std::max(a.y, b.y) + 1e-12;
}

}  // namespace

bool point_in_polygon(Point p, const Polygon& poly) {
  check_polygon(poly);
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point a = poly[i];
    const Point b = poly[j];
    if (on_segment(p, a, b)) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

double min_vertex_distance(Point p, const Polygon& poly) {
  if (poly.empty()) throw std::invalid_argument("min_vertex_distance: empty vertex list");
  double best = std::numeric_limits<double>::infinity();
  for (const Point& v : poly) best = std::min(best, std::hypot(p.x - v.x, p.y - v.y));
  return best;
}

std::string Variant::name() const {
  switch (kind) {
    case VariantKind::kOneGoal: return "nav2d-1g";
    case VariantKind::kTwoGoals: return "nav2d-2g";
    case VariantKind::kTwoGoalsReversed: return "nav2d-2g-rev";
    case VariantKind::kNGoals: return "nav2d-" + std::to_string(goals) + "g";
  }
  return "nav2d-?";
}

Variant Variant::n_goals(int n) {
  if (n < 1 || n > kMaxGoals) {
    throw std::length_error("nav2d: goal count " + std::to_string(n) + " outside [1, " +
                            std::to_string(kMaxGoals) + "]");
  }
  return Variant{VariantKind::kNGoals, n};
}

Variant Variant::parse(const std::string& text) {
  if (text == "nav2d-1g") return Variant{VariantKind::kOneGoal, 1};
  if (text == "nav2d-2g") return Variant{VariantKind::kTwoGoals, 2};
  if (text == "nav2d-2g-rev") return Variant{VariantKind::kTwoGoalsReversed, 2};
  const std::string prefix = "nav2d-";
  if (text.size() > prefix.size() + 1 && text.compare(0, prefix.size(), prefix) == 0 &&
      text.back() == 'g') {
    const std::string digits = text.substr(prefix.size(), text.size() - prefix.size() - 1);
    if (!digits.empty() && std::all_of(digits.begin(), digits.end(), ::isdigit)) {
      return n_goals(std::stoi(digits));
    }
  }
  throw std::invalid_argument("unknown environment '" + text +
                              "' (expected nav2d-1g, nav2d-2g, nav2d-2g-rev or nav2d-<n>g)");
}

std::vector<Point> ngoal_centers(int n) {
  Variant::n_goals(n);  // range check
  // Arc of radius sqrt(10) about the far corner, spanning (9,7) .. (7,9).
  const double r = std::sqrt(10.0);
  const double a0 = std::atan2(3.0, 1.0);
  const double a1 = std::atan2(1.0, 3.0);
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double s = n == 1 ? 0.5 : static_cast<double>(k) / (n - 1);
    const double a = a0 + (a1 - a0) * s;
    Point c{10.0 - r * std::cos(a), 10.0 - r * std::sin(a)};
    c.x = std::clamp(c.x, 0.5, 9.5);
    c.y = std::clamp(c.y, 0.5, 9.5);
    out.push_back(c);
  }
  return out;
}

MapSpec make_map(const Variant& variant) {
  MapSpec map;
  switch (variant.kind) {
    case VariantKind::kOneGoal:
      map.goals = {Goal{{9.0, 9.0}, 0.5, 0, "green"}};
      break;
    case VariantKind::kTwoGoals:
      map.goals = {Goal{{7.0, 9.0}, 0.5, 0, "green"}, Goal{{9.0, 7.0}, 0.5, 1, "red"}};
      break;
    case VariantKind::kTwoGoalsReversed:
      map.goals = {Goal{{7.0, 9.0}, 0.5, 1, "green"}, Goal{{9.0, 7.0}, 0.5, 0, "red"}};
      break;
    case VariantKind::kNGoals: {
      const auto centers = ngoal_centers(variant.goals);
      for (std::size_t k = 0; k < centers.size(); ++k) {
        map.goals.push_back(Goal{centers[k], 0.5, static_cast<int>(k), "goal" + std::to_string(k + 1)});
      }
      break;
    }
  }
  return map;
}

Nav2DEnv::Nav2DEnv(MapSpec map, std::string name) : map_(std::move(map)), name_(std::move(name)) {
  check_polygon(map_.obstacle);
  if (map_.goals.empty()) throw std::invalid_argument("Nav2DEnv: need at least one goal");
  if (static_cast<int>(map_.goals.size()) > kMaxGoals) {
    throw std::length_error("Nav2DEnv: too many goals");
  }
  for (const Goal& g : map_.goals) {
    if (!(g.radius > 0.0)) throw std::invalid_argument("Nav2DEnv: goal radius must be > 0");
    if (g.center.x < map_.lo || g.center.x > map_.hi || g.center.y < map_.lo || g.center.y > map_.hi) {
      throw std::invalid_argument("Nav2DEnv: goal centre outside the map");
    }
  }
  by_rank_.resize(map_.goals.size());
  std::iota(by_rank_.begin(), by_rank_.end(), std::size_t{0});
  std::stable_sort(by_rank_.begin(), by_rank_.end(), [&](std::size_t a, std::size_t b) {
    return map_.goals[a].rank < map_.goals[b].rank;
  });
  state_.goal_flags.assign(map_.goals.size(), false);
  state_.finished = true;
}

int Nav2DEnv::observation_dim() const { return 2 + 2 * static_cast<int>(map_.goals.size()); }

int Nav2DEnv::subtasks() const { return 2 + static_cast<int>(map_.goals.size()); }

std::vector<std::string> Nav2DEnv::subtask_names() const {
  std::vector<std::string> names{"in_boundary", "avoid_collision"};
  for (std::size_t k : by_rank_) names.push_back("reach_" + map_.goals[k].name);
  return names;
}

Vector Nav2DEnv::observation() const {
  Vector obs(observation_dim());
  obs(0) = state_.position.x;
  obs(1) = state_.position.y;
  for (std::size_t k = 0; k < map_.goals.size(); ++k) {
    obs(static_cast<Eigen::Index>(2 + 2 * k)) = map_.goals[k].center.x;
    obs(static_cast<Eigen::Index>(3 + 2 * k)) = map_.goals[k].center.y;
  }
  return obs;
}

Vector Nav2DEnv::reset(Rng& rng) {
  std::normal_distribution<double> nx(map_.start_mean.x, map_.start_std);
  std::normal_distribution<double> ny(map_.start_mean.y, map_.start_std);
  const double x = nx(rng);
  const double y = ny(rng);
  state_.position = {std::clamp(x, map_.start_clamp_lo, map_.start_clamp_hi),
                     std::clamp(y, map_.start_clamp_lo, map_.start_clamp_hi)};
  state_.t = 0;
  state_.goal_flags.assign(map_.goals.size(), false);
  state_.finished = false;
  return observation();
}

void Nav2DEnv::set_state(EnvState state) {
  if (state.goal_flags.size() != map_.goals.size()) {
    throw std::invalid_argument("Nav2DEnv::set_state: goal flag count mismatch");
  }
  state_ = std::move(state);
}

Vector Nav2DEnv::rewards(const StepInfo& info) const {
  Vector r(subtasks());
  r(0) = info.in_bounds ? 1.0 : 0.0;
  r(1) = info.in_obstacle
             ? map_.obstacle_sign * info.obstacle_vertex_distance * info.obstacle_vertex_distance
             : 0.0;
  for (std::size_t j = 0; j < by_rank_.size(); ++j) {
    const std::size_t k = by_rank_[j];
    const double d = info.goal_distances[k];
    double rk = map_.goal_reward;
    if (!state_.goal_flags[k]) {
      rk = map_.goal_penalty == GoalPenalty::kDivisor ? -d * d / map_.lambda : -map_.lambda * d * d;
    }
    r(static_cast<Eigen::Index>(2 + j)) = rk;
  }
  return r;
}

StepResult Nav2DEnv::step(const Vector& action) {
  if (state_.finished) throw InvalidStateError("Nav2DEnv::step called on a finished episode");
  if (action.size() != 2) throw std::invalid_argument("Nav2DEnv::step: action must be 2-D");
  const double ax = std::clamp(action(0), -1.0, 1.0);
  const double ay = std::clamp(action(1), -1.0, 1.0);
  state_.position.x += map_.v_max * ax;
  state_.position.y += map_.v_max * ay;
  state_.t += 1;

  const Point p = state_.position;
  StepInfo info;
  info.in_bounds = p.x >= map_.lo && p.x <= map_.hi && p.y >= map_.lo && p.y <= map_.hi;
  info.in_obstacle = point_in_polygon(p, map_.obstacle);
  info.obstacle_vertex_distance = min_vertex_distance(p, map_.obstacle);
  info.goal_distances.resize(map_.goals.size());
  for (std::size_t k = 0; k < map_.goals.size(); ++k) {
    const Goal& g = map_.goals[k];
    info.goal_distances[k] = std::hypot(p.x - g.center.x, p.y - g.center.y);
    if (info.goal_distances[k] <= g.radius) state_.goal_flags[k] = true;
  }

  StepResult out;
  out.rewards = rewards(info);
  out.done = !info.in_bounds;
  out.truncated = !out.done && state_.t >= map_.episode_limit;
  out.observation = observation();
  out.info = std::move(info);
  state_.finished = out.done || out.truncated;
  return out;
}

std::unique_ptr<Environment> Nav2DEnv::clone() const { return std::make_unique<Nav2DEnv>(*this); }

std::unique_ptr<Nav2DEnv> make_nav2d(const Variant& variant) {
  return std::make_unique<Nav2DEnv>(make_map(variant), variant.name());
}

void write_trajectory_header(std::ostream& out, int subtasks) {
  out << "# lexpg-trajectory v1\n";
  out << "episode,t,x,y,action_x,action_y";
  for (int i = 1; i <= subtasks; ++i) out << ",r_" << i;
  out << ",done\n";
}

void write_trajectory_row(std::ostream& out, const TrajectoryRow& row) {
  out << row.episode << ',' << row.t << ',' << row.x << ',' << row.y << ',' << row.action_x << ','
      << row.action_y;
  for (Eigen::Index i = 0; i < row.rewards.size(); ++i) out << ',' << row.rewards(i);
  out << ',' << (row.done ? 1 : 0) << '\n';
}

}  // namespace lexpg::nav2d
