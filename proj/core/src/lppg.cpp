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

#include "lexpg/lppg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lexpg {

namespace {

double eps_at(const Vector& eps, Eigen::Index i) {
  return eps.size() == 0 ? 0.0 : eps(i);
}

void check_level(const GradientStack& stack, int n, const char* what) {
  if (n < 1 || n > stack.subtasks()) {
    throw std::invalid_argument(std::string(what) + ": level " + std::to_string(n) +
                                " outside [1, " + std::to_string(stack.subtasks()) + "]");
  }
}

void check_eps(const GradientStack& stack, const Vector& eps) {
  if (eps.size() != 0 && eps.size() != stack.subtasks()) {
    throw std::invalid_argument("eps must be empty or have one entry per subtask");
  }
}

}  // namespace

GradientStack::GradientStack(Matrix grads) : grads_(std::move(grads)) {
  if (grads_.rows() < 1 || grads_.cols() < 1) {
    throw std::invalid_argument("GradientStack: need M >= 1 and P >= 1");
  }
  if (!grads_.allFinite()) {
    throw std::invalid_argument("GradientStack: non-finite gradient entry");
  }
}

Vector GradientStack::row(Eigen::Index level) const {
  return grads_.row(level - 1).transpose();
}

Cone build_cone(const GradientStack& stack, int n, const Vector& eps) {
  check_level(stack, n, "build_cone");
  check_eps(stack, eps);
  Cone cone(stack.dim());
  for (int i = 0; i < n; ++i) {
    cone.add(HalfSpace(stack.matrix().row(i).transpose(), eps_at(eps, i)));
  }
  return cone;
}

ProjectionResult direction_for_level(const GradientStack& stack, int n,
                                     const LppgConfig& config) {
  const Cone cone = build_cone(stack, n, config.eps);
  return dykstra(stack.row(n), cone, config.dykstra_tol, config.dykstra_max_iter);
}

DirectionResult lppg_direction(const GradientStack& stack, Rng& rng,
                               const LppgConfig& config,
                               std::optional<int> forced_level) {
  const int m = static_cast<int>(stack.subtasks());
  DirectionResult out;
  if (forced_level) {
    check_level(stack, *forced_level, "lppg_direction");
    out.sampled_level = *forced_level;
  } else {
    out.sampled_level = std::uniform_int_distribution<int>(1, m)(rng);
  }

  int n = out.sampled_level;
  while (n >= 1) {
    out.projection = direction_for_level(stack, n, config);
    ++out.projection_calls;
    const Vector probe = stack.row(n);
    if (out.projection.point.norm() > trivial_norm_threshold(probe)) {
      out.direction = out.projection.point;
      out.used_level = n;
      return out;
    }
    ++out.fallback_steps;
    if (config.resample_shortcut && n > 1) {
      n = std::uniform_int_distribution<int>(1, n - 1)(rng);
    } else {
      --n;
    }
  }
  out.direction = Vector::Zero(stack.dim());
  out.used_level = 0;
  return out;
}

double stepsize_bound(const GradientStack& stack, const Vector& d,
                      const Vector& smoothness) {
  if (d.size() != stack.dim()) {
    throw std::invalid_argument("stepsize_bound: dimension mismatch");
  }
  const double dd = d.squaredNorm();
  if (dd == 0.0) throw std::invalid_argument("stepsize_bound: zero direction");
  const auto n = smoothness.size();
  if (n < 1 || n > stack.subtasks()) {
    throw std::invalid_argument("stepsize_bound: need 1 <= n <= M smoothness constants");
  }
  double bound = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(smoothness(i) > 0.0)) {
      throw std::invalid_argument("stepsize_bound: smoothness constants must be > 0");
    }
    // Slack-permitted degradation (delta_i < 0) carries no guarantee.
    const double delta = std::max(0.0, stack.matrix().row(i).dot(d));
    bound = std::min(bound, 2.0 * delta / (smoothness(i) * dd));
  }
  return bound;
}

std::vector<double> first_order_check(const GradientStack& stack,
                                      const Vector& d, const Vector& eps,
                                      int n) {
  check_level(stack, n, "first_order_check");
  check_eps(stack, eps);
  if (d.size() != stack.dim()) {
    throw std::invalid_argument("first_order_check: dimension mismatch");
  }
  std::vector<double> slacks(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    slacks[static_cast<std::size_t>(i)] = stack.matrix().row(i).dot(d) + eps_at(eps, i);
  }
  return slacks;
}

double min_relative_slack(const GradientStack& stack, const Vector& d,
                          const Vector& eps, int n) {
  const std::vector<double> slacks = first_order_check(stack, d, eps, n);
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double norm = stack.matrix().row(i).norm();
    if (norm == 0.0) continue;
    worst = std::min(worst, slacks[static_cast<std::size_t>(i)] / norm);
  }
  return worst;
}

}  // namespace lexpg
