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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "test_util.hpp"

namespace lexpg::nav2d {
namespace {

using lexpg::testing::vec;

const Polygon kObstacle = MapSpec{}.obstacle;

EnvState at(const Nav2DEnv& env, double x, double y, int t = 0) {
  EnvState s;
  s.position = {x, y};
  s.t = t;
  s.goal_flags.assign(env.map().goals.size(), false);
  return s;
}

// Winding number about p; nonzero means inside.
int winding_number(Point p, const Polygon& poly) {
  int wn = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point a = poly[i];
    const Point b = poly[(i + 1) % poly.size()];
    const double cross = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
    if (a.y <= p.y) {
      if (b.y > p.y && cross > 0) ++wn;
    } else if (b.y <= p.y && cross < 0) {
      --wn;
    }
  }
  return wn;
}

TEST(PointInPolygon, CentroidAndFarPoint) {
  EXPECT_TRUE(point_in_polygon({5.75, 5.75}, kObstacle));
  EXPECT_FALSE(point_in_polygon({0, 0}, kObstacle));
}

TEST(PointInPolygon, BoundaryCountsAsInside) {
  EXPECT_TRUE(point_in_polygon({3.0, 7.5}, kObstacle));
  EXPECT_TRUE(point_in_polygon({3.5, 8.0}, kObstacle));
  EXPECT_TRUE(point_in_polygon({8.0, 3.5}, kObstacle));
}

TEST(PointInPolygon, DegeneratePolygonThrows) {
  EXPECT_THROW(point_in_polygon({0, 0}, {{0, 0}, {1, 1}}), std::invalid_argument);
  EXPECT_THROW(point_in_polygon({0, 0}, {{0, 0}, {1, 1}, {2, 2}}), std::invalid_argument);
}

TEST(PointInPolygon, AgreesWithWindingNumber) {
  Rng rng(42);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  int inside = 0;
  for (int k = 0; k < 1000; ++k) {
    const Point p{u(rng), u(rng)};
    const bool wn = winding_number(p, kObstacle) != 0;
    EXPECT_EQ(point_in_polygon(p, kObstacle), wn) << p.x << "," << p.y;
    inside += wn;
  }
  EXPECT_GT(inside, 20);
}

TEST(MinVertexDistance, Examples) {
  EXPECT_EQ(min_vertex_distance({4.0, 8.5}, kObstacle), 0.0);
  EXPECT_DOUBLE_EQ(min_vertex_distance({3.0, 8.5}, kObstacle), 1.0);
  EXPECT_THROW(min_vertex_distance({0, 0}, {}), std::invalid_argument);
}

TEST(MinVertexDistance, BoundedByEveryVertex) {
  Rng rng(1);
  std::uniform_real_distribution<double> u(-2.0, 12.0);
  for (int k = 0; k < 500; ++k) {
    const Point p{u(rng), u(rng)};
    const double d = min_vertex_distance(p, kObstacle);
    bool attained = false;
    for (const Point& v : kObstacle) {
      const double dv = std::hypot(p.x - v.x, p.y - v.y);
      EXPECT_LE(d, dv);
      attained |= d == dv;
    }
    EXPECT_TRUE(attained);
  }
}

TEST(Variant, ParseAndName) {
  EXPECT_EQ(Variant::parse("nav2d-1g").kind, VariantKind::kOneGoal);
  EXPECT_EQ(Variant::parse("nav2d-2g").kind, VariantKind::kTwoGoals);
  EXPECT_EQ(Variant::parse("nav2d-2g-rev").kind, VariantKind::kTwoGoalsReversed);
  EXPECT_EQ(Variant::parse("nav2d-10g").goals, 10);
  EXPECT_EQ(Variant::parse("nav2d-10g").name(), "nav2d-10g");
  EXPECT_THROW(Variant::parse("cartpole"), std::invalid_argument);
  EXPECT_THROW(Variant::n_goals(0), std::length_error);
  EXPECT_THROW(Variant::n_goals(129), std::length_error);
  EXPECT_NO_THROW(Variant::n_goals(128));
}

TEST(MakeNav2d, Shapes) {
  auto one = make_nav2d(Variant::parse("nav2d-1g"));
  EXPECT_EQ(one->subtasks(), 3);
  EXPECT_EQ(one->observation_dim(), 4);
  EXPECT_EQ(one->subtask_names(),
            (std::vector<std::string>{"in_boundary", "avoid_collision", "reach_green"}));
  auto two = make_nav2d(Variant::parse("nav2d-2g"));
  EXPECT_EQ(two->subtasks(), 4);
  EXPECT_EQ(two->observation_dim(), 6);
  auto ten = make_nav2d(Variant::n_goals(10));
  EXPECT_EQ(ten->subtasks(), 12);
  EXPECT_EQ(ten->observation_dim(), 22);
}

TEST(MakeNav2d, ReversedDiffersOnlyInRanks) {
  const MapSpec a = make_map(Variant::parse("nav2d-2g"));
  const MapSpec b = make_map(Variant::parse("nav2d-2g-rev"));
  ASSERT_EQ(a.goals.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(a.goals[k].center.x, b.goals[k].center.x);
    EXPECT_EQ(a.goals[k].center.y, b.goals[k].center.y);
    EXPECT_EQ(a.goals[k].radius, b.goals[k].radius);
    EXPECT_EQ(a.goals[k].name, b.goals[k].name);
    EXPECT_NE(a.goals[k].rank, b.goals[k].rank);
  }
  EXPECT_EQ(make_nav2d(Variant::parse("nav2d-2g"))->subtask_names()[2], "reach_green");
  EXPECT_EQ(make_nav2d(Variant::parse("nav2d-2g-rev"))->subtask_names()[2], "reach_red");
}

TEST(MakeNav2d, GoalCentersInsideAndOutsideObstacle) {
  for (int n : {1, 2, 5, 10, 40, 128}) {
    const MapSpec m = make_map(Variant::n_goals(n));
    ASSERT_EQ(m.goals.size(), static_cast<std::size_t>(n));
    for (const Goal& g : m.goals) {
      EXPECT_GE(g.center.x, 0.0);
      EXPECT_LE(g.center.x, 10.0);
      EXPECT_GE(g.center.y, 0.0);
      EXPECT_LE(g.center.y, 10.0);
      EXPECT_FALSE(point_in_polygon(g.center, m.obstacle));
      // Behind the obstacle as seen from the start region.
      EXPECT_GT(g.center.x + g.center.y, 12.5);
    }
  }
}

TEST(Reset, ReproducibleAndTailMatchesGoals) {
  auto env = make_nav2d(Variant::parse("nav2d-2g"));
  Rng a(5), b(5);
  const Vector oa = env->reset(a);
  const Vector ob = env->reset(b);
  EXPECT_EQ(oa, ob);
  EXPECT_EQ(oa.tail(4), vec({7, 9, 9, 7}));
}

TEST(Reset, StartDistributionMean) {
  auto env = make_nav2d(Variant::parse("nav2d-1g"));
  Rng rng(77);
  const int n = 10000;
  double sx = 0, sy = 0;
  for (int k = 0; k < n; ++k) {
    const Vector o = env->reset(rng);
    EXPECT_GE(o(0), 0.01);
    EXPECT_LE(o(0), 9.99);
    sx += o(0);
    sy += o(1);
  }
  const double bound = 3 * 0.5 / std::sqrt(static_cast<double>(n));
  // Clamping at 0.01 shifts the mean by far less than the bound.
  EXPECT_NEAR(sx / n, 1.0, bound);
  EXPECT_NEAR(sy / n, 1.0, bound);
}

TEST(Step, MovesByMaxVelocity) {
  auto env = make_nav2d(Variant::parse("nav2d-1g"));
  env->set_state(at(*env, 1, 1));
  const StepResult r = env->step(vec({1, 1}));
  EXPECT_DOUBLE_EQ(r.observation(0), 1.5);
  EXPECT_DOUBLE_EQ(r.observation(1), 1.5);
  EXPECT_EQ(r.rewards(0), 1.0);
  EXPECT_EQ(r.rewards(1), 0.0);
  EXPECT_NEAR(r.rewards(2), -(7.5 * 7.5 * 2) / 100.0, 1e-12);
  EXPECT_FALSE(r.done);
}

TEST(Step, ClampsActions) {
  auto env = make_nav2d(Variant::parse("nav2d-1g"));
  env->set_state(at(*env, 5, 1));
  const StepResult r = env->step(vec({3, -0.2}));
  EXPECT_DOUBLE_EQ(r.observation(0), 5.5);
  EXPECT_DOUBLE_EQ(r.observation(1), 0.9);
}

TEST(Step, LeavingTheMapTerminates) {
  auto env = make_nav2d(Variant::parse("nav2d-1g"));
  env->set_state(at(*env, 0.2, 5));
  const StepResult r = env->step(vec({-1, 0}));
  EXPECT_EQ(r.rewards(0), 0.0);
  EXPECT_TRUE(r.done);
  EXPECT_FALSE(r.truncated);
  EXPECT_THROW(env->step(vec({0, 0})), InvalidStateError);
}

TEST(Step, ClosedBoundary) {
  auto env = make_nav2d(Variant::parse("nav2d-1g"));
  env->set_state(at(*env, 0.5, 5));
  const StepResult r = env->step(vec({-1, 0}));
  EXPECT_EQ(r.rewards(0), 1.0);
  EXPECT_FALSE(r.done);
}

TEST(Step, TruncatesAtLimit) {
  auto env = make_nav2d(Variant::parse("nav2d-1g"));
  env->set_state(at(*env, 1, 1, 99));
  const StepResult r = env->step(vec({0, 0}));
  EXPECT_TRUE(r.truncated);
  EXPECT_FALSE(r.done);
}

TEST(Step, ObstaclePenaltyIsNegativeSquaredVertexDistance) {
  auto env = make_nav2d(Variant::parse("nav2d-1g"));
  env->set_state(at(*env, 5.75, 5.25));
  const StepResult r = env->step(vec({0, 1}));
  ASSERT_TRUE(r.info.in_obstacle);
  const double d = min_vertex_distance({5.75, 5.75}, kObstacle);
  EXPECT_DOUBLE_EQ(r.rewards(1), -d * d);
  EXPECT_LT(r.rewards(1), 0.0);
}

TEST(Step, GoalLatches) {
  auto env = make_nav2d(Variant::parse("nav2d-1g"));
  env->set_state(at(*env, 8.6, 9.0));
  StepResult r = env->step(vec({0.2, 0}));
  EXPECT_EQ(r.rewards(2), 10.0);
  EXPECT_TRUE(env->state().goal_flags[0]);
  r = env->step(vec({-1, -1}));
  EXPECT_GT(r.info.goal_distances[0], 0.5);
  EXPECT_EQ(r.rewards(2), 10.0);
}

TEST(Step, MultiplierReadingIsSelectable) {
  MapSpec m = make_map(Variant::parse("nav2d-1g"));
  m.goal_penalty = GoalPenalty::kMultiplier;
  Nav2DEnv env(m, "nav2d-1g");
  env.set_state(at(env, 1, 1));
  const StepResult r = env.step(vec({0, 0}));
  EXPECT_NEAR(r.rewards(2), -100.0 * 128.0, 1e-9);
}

TEST(Step, RewardOrderFollowsRank) {
  auto fwd = make_nav2d(Variant::parse("nav2d-2g"));
  auto rev = make_nav2d(Variant::parse("nav2d-2g-rev"));
  fwd->set_state(at(*fwd, 7, 8.7));
  rev->set_state(at(*rev, 7, 8.7));
  const StepResult a = fwd->step(vec({0, 0}));
  const StepResult b = rev->step(vec({0, 0}));
  EXPECT_EQ(a.rewards(2), 10.0);  // green first
  EXPECT_EQ(b.rewards(3), 10.0);  // green last
  EXPECT_EQ(a.rewards(3), b.rewards(2));
  EXPECT_EQ(a.observation, b.observation);
}

TEST(Episode, PropertiesUnderRandomPolicies) {
  for (const char* name : {"nav2d-1g", "nav2d-2g", "nav2d-2g-rev", "nav2d-6g"}) {
    auto env = make_nav2d(Variant::parse(name));
    Rng rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int ep = 0; ep < 50; ++ep) {
      env->reset(rng);
      std::vector<bool> latched(env->map().goals.size(), false);
      double k1 = 0.0;
      int len = 0;
      for (;;) {
        const StepResult r = env->step(vec({u(rng) + 0.3, u(rng) + 0.3}));
        ++len;
        ASSERT_EQ(r.rewards.size(), env->subtasks());
        EXPECT_EQ(r.rewards(0), r.info.in_bounds ? 1.0 : 0.0);
        const Point p{r.observation(0), r.observation(1)};
        if (!point_in_polygon(p, env->map().obstacle)) EXPECT_EQ(r.rewards(1), 0.0);
        for (std::size_t k = 0; k < latched.size(); ++k) {
          if (latched[k]) EXPECT_TRUE(env->state().goal_flags[k]);
          latched[k] = env->state().goal_flags[k];
        }
        k1 += r.rewards(0);
        if (r.done || r.truncated) {
          if (!r.done) EXPECT_EQ(k1, len);
          break;
        }
      }
      EXPECT_LE(env->state().t, 100);
    }
  }
}

TEST(Trajectory, CsvFormat) {
  std::ostringstream out;
  write_trajectory_header(out, 3);
  write_trajectory_row(out, TrajectoryRow{0, 1, 1.5, 1.5, 1, 1, vec({1, 0, -1.125}), false});
  EXPECT_EQ(out.str(),
            "# lexpg-trajectory v1\nepisode,t,x,y,action_x,action_y,r_1,r_2,r_3,done\n"
            "0,1,1.5,1.5,1,1,1,0,-1.125,0\n");
}

}  // namespace
}  // namespace lexpg::nav2d
