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

#ifndef LEXPG_PPO_HPP_
#define LEXPG_PPO_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "lexpg/env.hpp"
#include "lexpg/lppg.hpp"
#include "lexpg/nnet.hpp"

namespace lexpg {

/// Raised when an update produces non-finite numbers.
class AbortUpdate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// How the LPPG direction is turned into a parameter step.
enum class ActorStep {
  kSgd,  // theta += actor_lr * d
  kRms,  // theta += actor_lr * d / rms(d), rms tracked as a scalar running mean
};

struct TrainConfig {
  double actor_lr = 5e-5;
  double critic_lr = 1e-4;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  int batch = 2048;
  int minibatch = 64;
  int epochs = 10;
  double clip_ratio = 0.2;
  Vector eps;  // empty = all zero
  double dykstra_tol = kDefaultDykstraTolerance;
  int dykstra_max_iter = kDefaultDykstraMaxIter;
  bool resample_shortcut = false;
  // false pins the subproblem depth to N = M.
  bool subproblem_exploration = true;
  // Apply the level-1 gradient directly; the single-objective reference path.
  bool bypass_lppg = false;
  bool normalize_advantages = true;
  ActorStep actor_step = ActorStep::kSgd;
  double rms_decay = 0.999;
  // Consecutive non-converged projections tolerated before warning.
  int nonconverged_budget = 10;
  // Parallel rollout collectors, each with its own environment copy and streams.
  int workers = 1;
  std::uint64_t total_steps = 1'000'000;
  std::uint64_t seed = 0;
  std::vector<int> actor_hidden{64, 64, 64};
  std::vector<int> critic_hidden{64, 64, 64};

  LppgConfig lppg() const;
};

struct Bootstrap {
  int t = 0;          // last step of a non-terminal episode cut
  Vector next_state;  // observation after that step
  Vector value;       // V(next_state), one entry per subtask
};

/// Column t of each matrix holds step t.
struct RolloutBuffer {
  Matrix states;    // S x T
  Matrix actions;   // A x T, in (-1, 1)
  Matrix pre_tanh;  // A x T
  Vector log_probs;  // T
  Matrix rewards;   // M x T, priority order
  std::vector<std::uint8_t> dones;      // true termination
  std::vector<std::uint8_t> truncated;  // cut by the step limit or the buffer end
  Matrix values;    // M x T
  std::vector<Bootstrap> bootstraps;

  int size() const { return static_cast<int>(log_probs.size()); }
  int subtasks() const { return static_cast<int>(rewards.rows()); }
};

struct AdvantageSet {
  Matrix advantages;  // M x T
  Matrix returns;     // M x T
};

/// Steps an environment across calls, carrying unfinished episodes over.
class RolloutCollector {
 public:
  RolloutCollector(std::unique_ptr<Environment> env, Rng env_rng, Rng action_rng);

  RolloutBuffer collect(const GaussianPolicy& policy, const Vector& actor,
                        const MultiHeadCritic& critic, const Vector& critic_params, int steps);

  /// Per-subtask returns of episodes finished since the last call.
  std::vector<Vector> take_finished_returns();
  const Environment& env() const { return *env_; }

 private:
  std::unique_ptr<Environment> env_;
  Rng env_rng_;
  Rng action_rng_;
  Vector obs_;
  Vector running_;
  bool need_reset_ = true;
  std::vector<Vector> finished_;
};

RolloutBuffer collect_rollouts(Environment& env, const GaussianPolicy& policy,
                               const Vector& actor, const MultiHeadCritic& critic,
                               const Vector& critic_params, int steps, Rng& rng);

/// Appends buffers in order; bootstrap indices are shifted accordingly.
RolloutBuffer concat_buffers(const std::vector<RolloutBuffer>& parts);

AdvantageSet compute_gae(const RolloutBuffer& buffer, double gamma, double lambda);

/// A gathered subset of a buffer.
struct Minibatch {
  Matrix states;
  Matrix pre_tanh;
  Vector old_log_probs;
  Matrix advantages;  // M x B
  Matrix returns;     // M x B
};

Minibatch gather(const RolloutBuffer& buffer, const AdvantageSet& adv,
                 const std::vector<int>& indices);
Minibatch whole(const RolloutBuffer& buffer, const AdvantageSet& adv);

/// Per-subtask standardisation (mean 0, std 1, std floored at 1e-8).
Matrix normalize_rows(const Matrix& advantages);

struct SurrogateEval {
  Vector values;  // per-subtask surrogate objective
  Matrix grads;   // M x P ascent gradients
};

/// Clipped surrogate mean_t min(rho A, clip(rho, 1 +- c) A) for every row of
/// `advantages`, together with its exact gradient.
SurrogateEval clipped_surrogate(const GaussianPolicy& policy, const Vector& params,
                                const Minibatch& batch, const Matrix& advantages,
                                double clip_ratio);

/// The advantages used are batch.advantages as given (no normalisation).
GradientStack subtask_policy_gradients(const GaussianPolicy& policy, const Vector& params,
                                       const Minibatch& batch, double clip_ratio);

/// Sum over heads of the mean squared error to `returns`.
double critic_loss(const MultiHeadCritic& critic, const Vector& params, const Matrix& states,
                   const Matrix& returns, Vector* gradient = nullptr);

/// One plain gradient step; returns the pre-step loss.
double critic_update(const MultiHeadCritic& critic, Vector& params, const Matrix& states,
                     const Matrix& returns, double lr);

class ClippedSurrogateLoss final : public DifferentiableLoss {
 public:
  ClippedSurrogateLoss(const GaussianPolicy& policy, Minibatch batch, int subtask,
                       double clip_ratio);
  Eigen::Index dim() const override { return policy_.layout().size(); }
  double value(const Vector& params) const override;
  Vector gradient(const Vector& params) const override;

 private:
  const GaussianPolicy& policy_;
  Minibatch batch_;
  int subtask_;
  double clip_ratio_;
};

class CriticMseLoss final : public DifferentiableLoss {
 public:
  CriticMseLoss(const MultiHeadCritic& critic, Matrix states, Matrix returns);
  Eigen::Index dim() const override { return critic_.layout().size(); }
  double value(const Vector& params) const override;
  Vector gradient(const Vector& params) const override;

 private:
  const MultiHeadCritic& critic_;
  Matrix states_;
  Matrix returns_;
};

struct UpdateStats {
  Vector surrogate;            // mean per-subtask surrogate over minibatches
  double direction_norm = 0.0;  // mean ||d*||
  std::vector<int> used_levels;  // histogram over 0..M
  std::vector<int> sampled_levels;  // histogram over 0..M (0 unused)
  double critic_loss = 0.0;     // mean pre-step loss
  double dykstra_iterations = 0.0;  // mean sweeps of the final projection
  int lppg_calls = 0;
  int fallback_steps = 0;
  int nonconverged = 0;
  bool nonconverged_warning = false;
  // min over applied directions of min_i (g_i^T d + eps_i) / ||g_i||.
  double min_relative_slack = 0.0;
};

/// Observation hook for each direction solve of an update.
struct DirectionEvent {
  const GradientStack& stack;
  const DirectionResult& result;
  double gradient_seconds = 0.0;
  double solve_seconds = 0.0;
};
using DirectionObserver = std::function<void(const DirectionEvent&)>;

struct UpdateState {
  Rng shuffle;
  Rng subproblem;
  double rms = 0.0;  // running mean of ||d||^2 / P for ActorStep::kRms
  std::uint64_t rms_count = 0;
  int consecutive_nonconverged = 0;
};

UpdateStats ppo_update(const RolloutBuffer& buffer, const AdvantageSet& adv,
                       const GaussianPolicy& policy, Vector& actor,
                       const MultiHeadCritic& critic, Vector& critic_params,
                       const TrainConfig& config, UpdateState& state,
                       const DirectionObserver& observer = {});

struct UpdateRecord {
  std::uint64_t step = 0;  // environment steps so far
  int update = 0;
  Vector episode_return;  // mean per-subtask return of episodes finished in this rollout
  int episodes = 0;
  UpdateStats stats;
};

/// LPPG-PPO on one environment instance.
class Trainer {
 public:
  Trainer(TrainConfig config, std::unique_ptr<Environment> env);

  const TrainConfig& config() const { return config_; }
  const GaussianPolicy& policy() const { return policy_; }
  const MultiHeadCritic& critic() const { return critic_; }
  const Vector& actor_params() const { return actor_; }
  const Vector& critic_params() const { return critic_params_; }
  std::uint64_t steps() const { return steps_; }

  /// One rollout + update. Returns its record.
  UpdateRecord iterate(const DirectionObserver& observer = {});
  /// Iterates until total_steps is reached.
  void run(const std::function<void(const UpdateRecord&)>& on_update = {},
           const DirectionObserver& observer = {});

 private:
  TrainConfig config_;
  GaussianPolicy policy_;
  MultiHeadCritic critic_;
  Vector actor_;
  Vector critic_params_;
  std::vector<RolloutCollector> collectors_;
  UpdateState update_state_;
  std::uint64_t steps_ = 0;
  int updates_ = 0;
};

struct EvalOptions {
  int episodes = 50;
  bool deterministic = false;
  double obs_noise = 0.0;  // std of Gaussian noise on the observed position
  std::uint64_t seed = 0;
};

struct EvalStep {
  int episode = 0;
  int t = 0;
  Vector observation;  // true observation after the step
  Vector action;
  Vector rewards;
  bool done = false;
};

/// Per-episode returns, episodes x M.
Matrix evaluate_policy(Environment& env, const GaussianPolicy& policy, const Vector& actor,
                       const EvalOptions& options,
                       const std::function<void(const EvalStep&)>& on_step = {});

}  // namespace lexpg

#endif  // LEXPG_PPO_HPP_
