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

#ifndef LEXPG_PROJECTION_HPP_
#define LEXPG_PROJECTION_HPP_

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace lexpg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Scale-relative thresholds shared by the projection kernel and its callers.
inline constexpr double kFeasibilityTolerance = 1e-6;
inline constexpr double kTrivialNormTolerance = 1e-6;
inline constexpr double kDefaultDykstraTolerance = 1e-6;
inline constexpr int kDefaultDykstraMaxIter = 500;
inline constexpr std::size_t kReferenceQpMaxConstraints = 20;

/// The closed half-space {d : normal^T d >= -offset}.
///
/// A zero normal describes the whole space and is flagged degenerate; every
/// projection treats such a constraint as a no-op.
class HalfSpace {
 public:
  HalfSpace(Vector normal, double offset = 0.0);

  const Vector& normal() const { return normal_; }
  double offset() const { return offset_; }
  double normal_squared_norm() const { return normal_sq_; }
  Eigen::Index dim() const { return normal_.size(); }
  bool degenerate() const { return normal_sq_ == 0.0; }

  /// normal^T d + offset; nonnegative iff d lies in the half-space.
  double slack(const Vector& d) const;

 private:
  Vector normal_;
  double offset_;
  double normal_sq_;
};

/// Intersection of half-spaces. Index 0 is the highest priority.
class Cone {
 public:
  explicit Cone(Eigen::Index dim);
  Cone(Eigen::Index dim, std::vector<HalfSpace> halfspaces);

  void add(HalfSpace h);

  Eigen::Index dim() const { return dim_; }
  std::size_t size() const { return halfspaces_.size(); }
  bool empty() const { return halfspaces_.empty(); }
  const HalfSpace& operator[](std::size_t i) const { return halfspaces_[i]; }
  const std::vector<HalfSpace>& halfspaces() const { return halfspaces_; }

  /// Largest distance from d to any violated half-space (0 if feasible).
  double max_violation(const Vector& d) const;

 private:
  Eigen::Index dim_;
  std::vector<HalfSpace> halfspaces_;
};

struct ProjectionResult {
  Vector point;
  int iterations = 0;
  bool converged = false;
  double max_violation = 0.0;
  // ||x^(t) - x^(t-1)|| for every completed sweep.
  std::vector<double> displacements;
};

struct DykstraOptions {
  double tol = kDefaultDykstraTolerance;
  int max_iter = kDefaultDykstraMaxIter;
  // Convergence additionally requires every constraint to be met within
  // min(tol, feasibility_tol), so that `converged` implies a feasible point.
  double feasibility_tol = kFeasibilityTolerance;
};

Vector project_halfspace(const Vector& x, const HalfSpace& h);

/// One sequential pass of half-space projections in priority order. The
/// result honours the last constraint but is in general neither feasible for
/// the whole cone nor the closest point.
Vector sop(const Vector& x0, const Cone& cone);

/// Dykstra's alternating projection of x0 onto the cone.
ProjectionResult dykstra(const Vector& x0, const Cone& cone,
                         const DykstraOptions& options = {});
ProjectionResult dykstra(const Vector& x0, const Cone& cone, double tol,
                         int max_iter);

/// Exact projection by active-set enumeration over all 2^M subsets. Intended
/// as an oracle; throws std::length_error above kReferenceQpMaxConstraints.
Vector reference_qp(const Vector& x0, const Cone& cone);

/// ||a - ref|| / max(1, ||ref||).
double relative_disagreement(const Vector& a, const Vector& ref);

/// Threshold under which a projected direction counts as the zero vector.
double trivial_norm_threshold(const Vector& probe);

/// True iff the projection of `probe` onto the cone is numerically zero.
bool is_trivial_cone(const Cone& cone, const Vector& probe, double tol,
                     int max_iter = kDefaultDykstraMaxIter);

}  // namespace lexpg

#endif  // LEXPG_PROJECTION_HPP_
