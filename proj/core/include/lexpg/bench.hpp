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

#ifndef LEXPG_BENCH_HPP_
#define LEXPG_BENCH_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lexpg/lppg.hpp"
#include "lexpg/ppo.hpp"

namespace lexpg {

enum class Solver {
  kDykstra,
  kSop,
  kReferenceQp,
  kNoop,  // returns g_n untouched; the measurement floor
};

std::string solver_name(Solver s);
/// Throws std::invalid_argument listing the valid names.
Solver parse_solver(const std::string& name);
std::vector<std::string> solver_names();

/// Forced-depth direction search (N = M with fallback) using `solver`.
DirectionResult solve_direction(const GradientStack& stack, Solver solver,
                                const LppgConfig& config);

struct BenchRecord {
  std::string solver;
  int n_goals = 0;  // 0 for synthetic stacks
  int M = 0;
  Eigen::Index P = 0;
  double mean_ms = 0.0;
  double std_ms = 0.0;
  double max_rel_disagreement = 0.0;  // NaN when no reference was available
  int seeds = 0;
  double median_ms = 0.0;
  double grad_mean_ms = 0.0;  // gradient computation plus solve; NaN without an env
  std::uint64_t calls = 0;
  std::uint64_t agreement_checks = 0;
};

struct BenchMeta {
  double timer_resolution_ns = 0.0;
  bool coarse_timer = false;  // resolution worse than 1 us
};

BenchMeta probe_timer();

struct SyntheticBenchOptions {
  std::vector<int> M_list{2, 3, 4, 5, 6};
  std::vector<Eigen::Index> P_list{100, 10'000};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::vector<Solver> solvers{Solver::kDykstra, Solver::kSop, Solver::kReferenceQp, Solver::kNoop};
  int instances = 20;  // stacks per seed
  int warmup = 10;
  LppgConfig lppg;
};

std::vector<BenchRecord> run_synthetic_bench(const SyntheticBenchOptions& options);

struct ProjectionBenchOptions {
  std::vector<int> variants{1};  // goal counts
  std::uint64_t steps = 100'000;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::vector<Solver> solvers{Solver::kDykstra, Solver::kSop, Solver::kReferenceQp, Solver::kNoop};
  int warmup = 10;
  // Check agreement on every k-th call; 1 checks all of them.
  int agreement_every = 1;
  TrainConfig train;
};

std::vector<BenchRecord> run_projection_bench(const ProjectionBenchOptions& options);

void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records,
                     const BenchMeta& meta);

}  // namespace lexpg

#endif  // LEXPG_BENCH_HPP_
