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

#include "lexpg/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lexpg {

namespace {

void check_dim(Eigen::Index expected, Eigen::Index got, const char* what) {
  if (expected != got) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(got) + " vs " +
                                std::to_string(expected) + ")");
  }
}

}  // namespace

HalfSpace::HalfSpace(Vector normal, double offset)
    : normal_(std::move(normal)), offset_(offset) {
  if (normal_.size() < 1) {
    throw std::invalid_argument("HalfSpace: dimension must be >= 1");
  }
  if (!(offset_ >= 0.0) || !std::isfinite(offset_)) {
    throw std::invalid_argument("HalfSpace: offset must be finite and >= 0");
  }
  if (!normal_.allFinite()) {
    throw std::invalid_argument("HalfSpace: normal must be finite");
  }
  normal_sq_ = normal_.squaredNorm();
}

double HalfSpace::slack(const Vector& d) const {
  check_dim(dim(), d.size(), "HalfSpace::slack");
  return normal_.dot(d) + offset_;
}

Cone::Cone(Eigen::Index dim) : dim_(dim) {
  if (dim_ < 1) throw std::invalid_argument("Cone: dimension must be >= 1");
}

Cone::Cone(Eigen::Index dim, std::vector<HalfSpace> halfspaces) : Cone(dim) {
  halfspaces_.reserve(halfspaces.size());
  for (auto& h : halfspaces) add(std::move(h));
}

void Cone::add(HalfSpace h) {
  check_dim(dim_, h.dim(), "Cone::add");
  halfspaces_.push_back(std::move(h));
}

double Cone::max_violation(const Vector& d) const {
  check_dim(dim_, d.size(), "Cone::max_violation");
  double worst = 0.0;
  for (const auto& h : halfspaces_) {
    if (h.degenerate()) continue;
    const double s = h.slack(d);
    if (s < 0.0) worst = std::max(worst, -s / std::sqrt(h.normal_squared_norm()));
  }
  return worst;
}

Vector project_halfspace(const Vector& x, const HalfSpace& h) {
  check_dim(h.dim(), x.size(), "project_halfspace");
  if (h.degenerate()) return x;
  const double s = h.normal().dot(x) + h.offset();
  if (s >= 0.0) return x;
  return x - (s / h.normal_squared_norm()) * h.normal();
}

Vector sop(const Vector& x0, const Cone& cone) {
  check_dim(cone.dim(), x0.size(), "sop");
  Vector d = x0;
  for (const auto& h : cone.halfspaces()) d = project_halfspace(d, h);
  return d;
}

ProjectionResult dykstra(const Vector& x0, const Cone& cone,
                         const DykstraOptions& options) {
  check_dim(cone.dim(), x0.size(), "dykstra");
  if (!(options.tol > 0.0)) throw std::invalid_argument("dykstra: tol must be > 0");
  if (options.max_iter < 1) throw std::invalid_argument("dykstra: max_iter must be >= 1");

  const std::size_t m = cone.size();
  // Each residual r_i is a nonpositive multiple of g_i, so only the scalar
  // coefficients are stored: r_i = coef[i] * g_i.
  std::vector<double> coef(m, 0.0);

  ProjectionResult result;
  result.point = x0;
  Vector& x = result.point;
  Vector previous(x.size());

  for (int t = 0; t < options.max_iter; ++t) {
    previous = x;
    for (std::size_t i = 0; i < m; ++i) {
      const HalfSpace& h = cone[i];
      if (h.degenerate()) continue;
      const double gg = h.normal_squared_norm();
      // y = x + r_i ; p = Proj(y) ; r_i = y - p ; x = p
      const double s = h.normal().dot(x) + coef[i] * gg + h.offset();
      const double next = std::min(0.0, s) / gg;
      const double delta = coef[i] - next;
      if (delta != 0.0) x.noalias() += delta * h.normal();
      coef[i] = next;
    }
    result.iterations = t + 1;
    const double displacement = (x - previous).norm();
    result.displacements.push_back(displacement);
    if (displacement <= options.tol) {
      result.max_violation = cone.max_violation(x);
      if (result.max_violation <= std::min(options.tol, options.feasibility_tol)) {
        result.converged = true;
        return result;
      }
    }
  }
  result.max_violation = cone.max_violation(x);
  return result;
}

ProjectionResult dykstra(const Vector& x0, const Cone& cone, double tol,
                         int max_iter) {
  DykstraOptions options;
  options.tol = tol;
  options.max_iter = max_iter;
  return dykstra(x0, cone, options);
}

Vector reference_qp(const Vector& x0, const Cone& cone) {
  check_dim(cone.dim(), x0.size(), "reference_qp");
  if (cone.size() > kReferenceQpMaxConstraints) {
    throw std::length_error("reference_qp: " + std::to_string(cone.size()) +
                            " constraints exceed the enumeration limit of " +
                            std::to_string(kReferenceQpMaxConstraints));
  }

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < cone.size(); ++i) {
    if (!cone[i].degenerate()) active.push_back(i);
  }
  const std::size_t m = active.size();
  const double scale = std::max(1.0, x0.norm());

  auto feasible = [&](const Vector& d) {
    for (std::size_t i : active) {
      const HalfSpace& h = cone[i];
      const double tol = 1e-9 * std::sqrt(h.normal_squared_norm()) * scale;
      if (h.slack(d) < -tol) return false;
    }
    return true;
  };

  Vector best;
  double best_dist = std::numeric_limits<double>::infinity();
  const std::size_t subsets = std::size_t{1} << m;
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    std::vector<std::size_t> rows;
    for (std::size_t j = 0; j < m; ++j) {
      if (mask & (std::size_t{1} << j)) rows.push_back(active[j]);
    }
    Vector candidate = x0;
    if (!rows.empty()) {
      const auto k = static_cast<Eigen::Index>(rows.size());
      Matrix a(k, x0.size());
      Vector rhs(k);
      for (Eigen::Index r = 0; r < k; ++r) {
        const HalfSpace& h = cone[rows[static_cast<std::size_t>(r)]];
        a.row(r) = h.normal().transpose();
        rhs(r) = h.normal().dot(x0) + h.offset();
      }
      // g_i^T (x0 - A^T lambda) = -eps_i  <=>  (A A^T) lambda = A x0 + eps
      const Matrix gram = a * a.transpose();
      Eigen::JacobiSVD<Matrix> svd(gram, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const Vector& sv = svd.singularValues();
      const double cutoff = 1e-10 * (sv.size() > 0 ? sv(0) : 0.0);
      Vector utb = svd.matrixU().transpose() * rhs;
      for (Eigen::Index r = 0; r < sv.size(); ++r) {
        utb(r) = sv(r) > cutoff ? utb(r) / sv(r) : 0.0;
      }
      const Vector lambda = svd.matrixV() * utb;
      candidate.noalias() -= a.transpose() * lambda;
    }
    if (!feasible(candidate)) continue;
    const double dist = (candidate - x0).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = std::move(candidate);
    }
  }
  if (best.size() == 0) {
    throw std::logic_error("reference_qp: no feasible candidate (inconsistent cone)");
  }
  return best;
}

double relative_disagreement(const Vector& a, const Vector& ref) {
  if (a.size() != ref.size()) throw std::invalid_argument("relative_disagreement: size mismatch");
  return (a - ref).norm() / std::max(1.0, ref.norm());
}

double trivial_norm_threshold(const Vector& probe) {
  return kTrivialNormTolerance * std::max(1.0, probe.norm());
}

bool is_trivial_cone(const Cone& cone, const Vector& probe, double tol,
                     int max_iter) {
  const ProjectionResult r = dykstra(probe, cone, tol, max_iter);
  return r.point.norm() <= trivial_norm_threshold(probe);
}

}  // namespace lexpg
