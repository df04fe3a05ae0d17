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

#include "lexpg/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <stdexcept>

#include "lexpg/nav2d.hpp"

namespace lexpg {

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Samples {
  std::vector<double> ms;
  std::vector<double> grad_ms;
  double max_disagreement = 0.0;
  std::uint64_t checks = 0;
  bool reference_available = true;
};

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  return m;
}

BenchRecord summarize(const std::string& solver, int n_goals, int M, Eigen::Index P, int seeds,
                      const Samples& s) {
  BenchRecord r;
  r.solver = solver;
  r.n_goals = n_goals;
  r.M = M;
  r.P = P;
  r.seeds = seeds;
  r.calls = s.ms.size();
  if (!s.ms.empty()) {
    double sum = 0.0;
    for (double x : s.ms) sum += x;
    r.mean_ms = sum / static_cast<double>(s.ms.size());
    double sq = 0.0;
    for (double x : s.ms) sq += (x - r.mean_ms) * (x - r.mean_ms);
    r.std_ms = std::sqrt(sq / static_cast<double>(s.ms.size()));
    r.median_ms = median(s.ms);
  }
  if (s.grad_ms.empty()) {
    r.grad_mean_ms = kNaN;
  } else {
    double sum = 0.0;
    for (double x : s.grad_ms) sum += x;
    r.grad_mean_ms = sum / static_cast<double>(s.grad_ms.size());
  }
  r.agreement_checks = s.checks;
  r.max_rel_disagreement = (s.reference_available && s.checks > 0) ? s.max_disagreement : kNaN;
  return r;
}

ProjectionResult project_with(Solver solver, const Vector& x0, const Cone& cone,
                              const LppgConfig& config) {
  switch (solver) {
    case Solver::kDykstra:
      return dykstra(x0, cone, config.dykstra_tol, config.dykstra_max_iter);
    case Solver::kSop: {
      ProjectionResult r;
      r.point = sop(x0, cone);
      r.iterations = 1;
      r.max_violation = cone.max_violation(r.point);
      r.converged = r.max_violation <= kFeasibilityTolerance;
      return r;
    }
    case Solver::kReferenceQp: {
      ProjectionResult r;
      r.point = reference_qp(x0, cone);
      r.max_violation = cone.max_violation(r.point);
      r.converged = true;
      return r;
    }
    case Solver::kNoop: {
      ProjectionResult r;
      r.point = x0;
      r.converged = true;
      return r;
    }
  }
  throw std::logic_error("unknown solver");
}

double timed_solve(const GradientStack& stack, Solver solver, const LppgConfig& config,
                   DirectionResult* out) {
  const auto t0 = Clock::now();
  DirectionResult r = solve_direction(stack, solver, config);
  const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  if (out) *out = std::move(r);
  return ms;
}

// Disagreement of `r` against the exact projection at the level r settled on.
void check_agreement(const GradientStack& stack, const DirectionResult& r, Solver solver,
                     const LppgConfig& config, Samples& s) {
  if (r.used_level == 0) return;
  if (solver == Solver::kDykstra && !r.projection.converged) return;
  if (static_cast<std::size_t>(stack.subtasks()) > kReferenceQpMaxConstraints) {
    s.reference_available = false;
    return;
  }
  const Cone cone = build_cone(stack, r.used_level, config.eps);
  const Vector x0 = stack.row(r.used_level);
  const Vector ref = reference_qp(x0, cone);
  s.max_disagreement = std::max(s.max_disagreement, relative_disagreement(r.direction, ref));
  ++s.checks;
}

}  // namespace

std::string solver_name(Solver s) {
  switch (s) {
    case Solver::kDykstra: return "dykstra";
    case Solver::kSop: return "sop";
    case Solver::kReferenceQp: return "reference_qp";
    case Solver::kNoop: return "noop";
  }
  return "?";
}

std::vector<std::string> solver_names() { return {"dykstra", "sop", "reference_qp", "noop"}; }

Solver parse_solver(const std::string& name) {
  for (Solver s : {Solver::kDykstra, Solver::kSop, Solver::kReferenceQp, Solver::kNoop}) {
    if (solver_name(s) == name) return s;
  }
  std::string valid;
  for (const auto& n : solver_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown solver '" + name + "' (valid: " + valid + ")");
}

DirectionResult solve_direction(const GradientStack& stack, Solver solver,
                                const LppgConfig& config) {
  DirectionResult out;
  const int m = static_cast<int>(stack.subtasks());
  out.sampled_level = m;
  for (int n = m; n >= 1; --n) {
    const Cone cone = build_cone(stack, n, config.eps);
    const Vector probe = stack.row(n);
    out.projection = project_with(solver, probe, cone, config);
    ++out.projection_calls;
    if (out.projection.point.norm() > trivial_norm_threshold(probe)) {
      out.direction = out.projection.point;
      out.used_level = n;
      return out;
    }
    ++out.fallback_steps;
  }
  out.direction = Vector::Zero(stack.dim());
  return out;
}

BenchMeta probe_timer() {
  BenchMeta meta;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 1000; ++i) {
    const auto a = Clock::now();
    auto b = Clock::now();
    while (b == a) b = Clock::now();
    best = std::min(best, std::chrono::duration<double, std::nano>(b - a).count());
  }
  const double tick = 1e9 * static_cast<double>(Clock::period::num) /
                      static_cast<double>(Clock::period::den);
  meta.timer_resolution_ns = std::max(best, tick);
  meta.coarse_timer = meta.timer_resolution_ns > 1000.0;
  return meta;
}

std::vector<BenchRecord> run_synthetic_bench(const SyntheticBenchOptions& options) {
  if (options.solvers.empty()) throw std::invalid_argument("bench: no solvers given");
  std::vector<BenchRecord> out;
  for (int M : options.M_list) {
    for (Eigen::Index P : options.P_list) {
      if (M < 1 || P < 1) throw std::invalid_argument("bench: M and P must be positive");
      std::vector<GradientStack> stacks;
      for (std::uint64_t seed : options.seeds) {
        Rng rng = make_stream(seed ^ (static_cast<std::uint64_t>(M) << 32) ^
                                  static_cast<std::uint64_t>(P),
                              Stream::kBench);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int k = 0; k < options.instances; ++k) {
          Matrix g(M, P);
          for (Eigen::Index j = 0; j < P; ++j) {
            for (int i = 0; i < M; ++i) g(i, j) = normal(rng);
          }
          stacks.emplace_back(std::move(g));
        }
      }
      if (stacks.empty()) continue;
      for (Solver solver : options.solvers) {
        for (int w = 0; w < options.warmup; ++w) {
          timed_solve(stacks[static_cast<std::size_t>(w) % stacks.size()], solver, options.lppg,
                      nullptr);
        }
        Samples s;
        for (const auto& stack : stacks) {
          DirectionResult r;
          s.ms.push_back(timed_solve(stack, solver, options.lppg, &r));
          check_agreement(stack, r, solver, options.lppg, s);
        }
        out.push_back(summarize(solver_name(solver), 0, M, P,
                                static_cast<int>(options.seeds.size()), s));
      }
    }
  }
  return out;
}

std::vector<BenchRecord> run_projection_bench(const ProjectionBenchOptions& options) {
  if (options.solvers.empty()) throw std::invalid_argument("bench: no solvers given");
  if (options.agreement_every < 1) throw std::invalid_argument("bench: agreement_every must be >= 1");
  std::vector<BenchRecord> out;
  for (int n_goals : options.variants) {
    const nav2d::Variant variant = nav2d::Variant::n_goals(n_goals);
    std::map<Solver, Samples> samples;
    int M = 0;
    Eigen::Index P = 0;
    for (std::uint64_t seed : options.seeds) {
      TrainConfig cfg = options.train;
      cfg.subproblem_exploration = false;
      cfg.total_steps = options.steps;
      cfg.seed = seed;
      Trainer trainer(cfg, nav2d::make_nav2d(variant));
      const LppgConfig lppg = cfg.lppg();
      std::uint64_t event = 0;
      trainer.run({}, [&](const DirectionEvent& e) {
        M = static_cast<int>(e.stack.subtasks());
        P = e.stack.dim();
        const bool warm = event < static_cast<std::uint64_t>(options.warmup);
        const bool check = event % static_cast<std::uint64_t>(options.agreement_every) == 0;
        ++event;
        for (Solver solver : options.solvers) {
          DirectionResult r;
          const double ms = timed_solve(e.stack, solver, lppg, &r);
          if (warm) continue;
          Samples& s = samples[solver];
          s.ms.push_back(ms);
          s.grad_ms.push_back(ms + 1e3 * e.gradient_seconds);
          if (check) check_agreement(e.stack, r, solver, lppg, s);
        }
      });
    }
    for (Solver solver : options.solvers) {
      out.push_back(summarize(solver_name(solver), n_goals, M, P,
                              static_cast<int>(options.seeds.size()), samples[solver]));
    }
  }
  return out;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records,
                     const BenchMeta& meta) {
  auto num = [](double v) {
    if (std::isnan(v)) return std::string("NA");
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::string(buf);
  };
  out << "# lexpg-bench v1 timer_resolution_ns=" << num(meta.timer_resolution_ns) << "\n";
  if (meta.coarse_timer) out << "# warning: timer resolution coarser than 1 us\n";
  out << "solver,n_goals,M,P,mean_ms,std_ms,max_rel_disagreement,seeds,median_ms,"
         "grad_mean_ms,calls\n";
  for (const auto& r : records) {
    out << r.solver << ',' << r.n_goals << ',' << r.M << ',' << r.P << ',' << num(r.mean_ms)
        << ',' << num(r.std_ms) << ',' << num(r.max_rel_disagreement) << ',' << r.seeds << ','
        << num(r.median_ms) << ',' << num(r.grad_mean_ms) << ',' << r.calls << "\n";
  }
}

}  // namespace lexpg
