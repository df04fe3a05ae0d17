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

#ifndef LEXPG_CLI_COMMANDS_HPP_
#define LEXPG_CLI_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lexpg/bench.hpp"
#include "lexpg_cli/config.hpp"

namespace lexpg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitAbort = 3;

using Override = std::pair<std::string, std::string>;

/// defaults < file < LEXPG_* variables < overrides.
Config load_config(const std::optional<std::filesystem::path>& file,
                   const std::vector<Override>& overrides, bool use_environment = true);

std::string run_id(const Config& config);
std::string format_real(double v);

struct TrainResult {
  int status = kExitOk;
  std::filesystem::path run_dir;
  std::string run_id;
  std::uint64_t steps = 0;
  int updates = 0;
};

TrainResult cmd_train(const Config& config, std::ostream& log);

struct EvalRequest {
  std::filesystem::path checkpoint;
  std::optional<std::string> variant;  // defaults to the checkpoint's
  std::vector<Override> env_overrides;
  int episodes = 50;
  bool deterministic = false;
  double obs_noise = 0.0;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> trajectory;
  std::optional<std::filesystem::path> summary;
};

int cmd_eval(const EvalRequest& request, std::ostream& out);

struct BenchRequest {
  bool synthetic = true;
  std::vector<int> M_list{2, 3, 4, 5, 6};
  std::vector<Eigen::Index> P_list{100, 10'000};
  std::vector<int> goals{1};
  std::uint64_t steps = 100'000;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::vector<Solver> solvers{Solver::kDykstra, Solver::kSop, Solver::kReferenceQp, Solver::kNoop};
  int instances = 20;
  int warmup = 10;
  int agreement_every = 1;
  double dykstra_tol = kDefaultDykstraTolerance;
  int dykstra_max_iter = kDefaultDykstraMaxIter;
  std::optional<std::filesystem::path> output;
};

int cmd_bench(const BenchRequest& request, std::ostream& out);

int cmd_export_params(const std::filesystem::path& checkpoint, std::ostream& out);
int cmd_export_config(const Config& config, std::ostream& out);

/// Parses "2..6" or "1,3,5" (or a mix) into an ascending-order-preserving list.
std::vector<long long> parse_int_list(const std::string& text);

/// Full command-line entry point; argv[0] is the program name.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace lexpg::cli

#endif  // LEXPG_CLI_COMMANDS_HPP_
