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

#include "lexpg/ppo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

namespace lexpg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw AbortUpdate(std::string(what) + ": non-finite values");
}

}  // namespace

LppgConfig TrainConfig::lppg() const {
  LppgConfig c;
  c.eps = eps;
  c.dykstra_tol = dykstra_tol;
  c.dykstra_max_iter = dykstra_max_iter;
  c.resample_shortcut = resample_shortcut;
  return c;
}

// ---------------------------------------------------------------------------
// Rollouts

RolloutCollector::RolloutCollector(std::unique_ptr<Environment> env, Rng env_rng, Rng action_rng)
    : env_(std::move(env)), env_rng_(env_rng), action_rng_(action_rng) {
  if (!env_) throw std::invalid_argument("RolloutCollector: null environment");
}

RolloutBuffer RolloutCollector::collect(const GaussianPolicy& policy, const Vector& actor,
                                        const MultiHeadCritic& critic,
                                        const Vector& critic_params, int steps) {
  if (steps < 1) throw std::invalid_argument("collect_rollouts: steps must be positive");
  const int S = env_->observation_dim();
  const int A = env_->action_dim();
  const int M = env_->subtasks();
  if (policy.state_dim() != S || policy.action_dim() != A || critic.state_dim() != S ||
      critic.subtasks() != M) {
    throw std::invalid_argument("collect_rollouts: network shapes do not match the environment");
  }

  RolloutBuffer buf;
  buf.states.resize(S, steps);
  buf.actions.resize(A, steps);
  buf.pre_tanh.resize(A, steps);
  buf.log_probs.resize(steps);
  buf.rewards.resize(M, steps);
  buf.dones.assign(static_cast<std::size_t>(steps), 0);
  buf.truncated.assign(static_cast<std::size_t>(steps), 0);

  for (int t = 0; t < steps; ++t) {
    if (need_reset_) {
      obs_ = env_->reset(env_rng_);
      running_ = Vector::Zero(M);
      need_reset_ = false;
    }
    buf.states.col(t) = obs_;
    const ActionSample a = log_prob_and_sample(policy.forward(actor, obs_), action_rng_);
    buf.actions.col(t) = a.action;
    buf.pre_tanh.col(t) = a.pre_tanh;
    buf.log_probs(t) = a.log_prob;

    StepResult r = env_->step(a.action);
    if (r.rewards.size() != M) throw std::runtime_error("environment returned wrong reward count");
    buf.rewards.col(t) = r.rewards;
    running_ += r.rewards;
    obs_ = std::move(r.observation);

    const bool last = t + 1 == steps;
    if (r.done) {
      buf.dones[static_cast<std::size_t>(t)] = 1;
    } else if (r.truncated || last) {
      buf.truncated[static_cast<std::size_t>(t)] = 1;
      buf.bootstraps.push_back({t, obs_, Vector()});
    }
    if (r.done || r.truncated) {
      finished_.push_back(running_);
      need_reset_ = true;
    }
  }

  buf.values = critic.forward_batch(critic_params, buf.states);
  if (!buf.bootstraps.empty()) {
    Matrix next(S, static_cast<Eigen::Index>(buf.bootstraps.size()));
    for (std::size_t k = 0; k < buf.bootstraps.size(); ++k) {
      next.col(static_cast<Eigen::Index>(k)) = buf.bootstraps[k].next_state;
    }
    const Matrix v = critic.forward_batch(critic_params, next);
    for (std::size_t k = 0; k < buf.bootstraps.size(); ++k) {
      buf.bootstraps[k].value = v.col(static_cast<Eigen::Index>(k));
    }
  }
  return buf;
}

std::vector<Vector> RolloutCollector::take_finished_returns() {
  std::vector<Vector> out;
  out.swap(finished_);
  return out;
}

RolloutBuffer collect_rollouts(Environment& env, const GaussianPolicy& policy,
                               const Vector& actor, const MultiHeadCritic& critic,
                               const Vector& critic_params, int steps, Rng& rng) {
  // One generator drives resets and actions alike.
  class Borrowed final : public Environment {
   public:
    explicit Borrowed(Environment& e) : e_(e) {}
    std::string name() const override { return e_.name(); }
    int observation_dim() const override { return e_.observation_dim(); }
    int action_dim() const override { return e_.action_dim(); }
    int subtasks() const override { return e_.subtasks(); }
    std::vector<std::string> subtask_names() const override { return e_.subtask_names(); }
    Vector reset(Rng& r) override { return e_.reset(r); }
    StepResult step(const Vector& a) override { return e_.step(a); }
    std::unique_ptr<Environment> clone() const override { return e_.clone(); }

   private:
    Environment& e_;
  };
  Rng env_rng(rng());
  Rng action_rng(rng());
  RolloutCollector c(std::make_unique<Borrowed>(env), env_rng, action_rng);
  return c.collect(policy, actor, critic, critic_params, steps);
}

RolloutBuffer concat_buffers(const std::vector<RolloutBuffer>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_buffers: nothing to join");
  if (parts.size() == 1) return parts.front();
  Eigen::Index T = 0;
  for (const auto& p : parts) T += p.size();
  const RolloutBuffer& f = parts.front();
  RolloutBuffer out;
  out.states.resize(f.states.rows(), T);
  out.actions.resize(f.actions.rows(), T);
  out.pre_tanh.resize(f.pre_tanh.rows(), T);
  out.log_probs.resize(T);
  out.rewards.resize(f.rewards.rows(), T);
  out.values.resize(f.values.rows(), T);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    const Eigen::Index n = p.size();
    out.states.middleCols(at, n) = p.states;
    out.actions.middleCols(at, n) = p.actions;
    out.pre_tanh.middleCols(at, n) = p.pre_tanh;
    out.log_probs.segment(at, n) = p.log_probs;
    out.rewards.middleCols(at, n) = p.rewards;
    out.values.middleCols(at, n) = p.values;
    out.dones.insert(out.dones.end(), p.dones.begin(), p.dones.end());
    out.truncated.insert(out.truncated.end(), p.truncated.begin(), p.truncated.end());
    for (Bootstrap b : p.bootstraps) {
      b.t += static_cast<int>(at);
      out.bootstraps.push_back(std::move(b));
    }
    at += n;
  }
  return out;
}

AdvantageSet compute_gae(const RolloutBuffer& buffer, double gamma, double lambda) {
  const int T = buffer.size();
  const Eigen::Index M = buffer.rewards.rows();
  if (buffer.values.rows() != M || buffer.values.cols() != T || buffer.rewards.cols() != T) {
    throw std::invalid_argument("compute_gae: buffer is incomplete");
  }
  std::vector<const Bootstrap*> boot(static_cast<std::size_t>(T), nullptr);
  for (const auto& b : buffer.bootstraps) {
    if (b.t < 0 || b.t >= T || b.value.size() != M) {
      throw std::invalid_argument("compute_gae: malformed bootstrap");
    }
    boot[static_cast<std::size_t>(b.t)] = &b;
  }

  AdvantageSet out;
  out.advantages.resize(M, T);
  Vector next_adv = Vector::Zero(M);
  for (int t = T - 1; t >= 0; --t) {
    const auto ut = static_cast<std::size_t>(t);
    Vector next_value;
    if (buffer.dones[ut]) {
      next_value = Vector::Zero(M);
      next_adv.setZero();
    } else if (buffer.truncated[ut] || t == T - 1) {
      if (!boot[ut]) throw std::invalid_argument("compute_gae: missing bootstrap at a cut");
      next_value = boot[ut]->value;
      next_adv.setZero();
    } else {
      next_value = buffer.values.col(t + 1);
    }
    const Vector delta = buffer.rewards.col(t) + gamma * next_value - buffer.values.col(t);
    next_adv = delta + gamma * lambda * next_adv;
    out.advantages.col(t) = next_adv;
  }
  out.returns = out.advantages + buffer.values;
  return out;
}

// ---------------------------------------------------------------------------
// Losses

Minibatch gather(const RolloutBuffer& buffer, const AdvantageSet& adv,
                 const std::vector<int>& indices) {
  const auto B = static_cast<Eigen::Index>(indices.size());
  Minibatch mb;
  mb.states.resize(buffer.states.rows(), B);
  mb.pre_tanh.resize(buffer.pre_tanh.rows(), B);
  mb.old_log_probs.resize(B);
  mb.advantages.resize(adv.advantages.rows(), B);
  mb.returns.resize(adv.returns.rows(), B);
  for (Eigen::Index k = 0; k < B; ++k) {
    const int t = indices[static_cast<std::size_t>(k)];
    mb.states.col(k) = buffer.states.col(t);
    mb.pre_tanh.col(k) = buffer.pre_tanh.col(t);
    mb.old_log_probs(k) = buffer.log_probs(t);
    mb.advantages.col(k) = adv.advantages.col(t);
    mb.returns.col(k) = adv.returns.col(t);
  }
  return mb;
}

Minibatch whole(const RolloutBuffer& buffer, const AdvantageSet& adv) {
  std::vector<int> all(static_cast<std::size_t>(buffer.size()));
  std::iota(all.begin(), all.end(), 0);
  return gather(buffer, adv, all);
}

Matrix normalize_rows(const Matrix& advantages) {
  Matrix out(advantages.rows(), advantages.cols());
  const double n = static_cast<double>(advantages.cols());
  for (Eigen::Index i = 0; i < advantages.rows(); ++i) {
    const double mean = advantages.row(i).mean();
    const double var = (advantages.row(i).array() - mean).square().sum() / n;
    const double sd = std::max(std::sqrt(var), 1e-8);
    out.row(i) = (advantages.row(i).array() - mean) / sd;
  }
  return out;
}

SurrogateEval clipped_surrogate(const GaussianPolicy& policy, const Vector& params,
                                const Minibatch& batch, const Matrix& advantages,
                                double clip_ratio) {
  const Eigen::Index B = batch.states.cols();
  const Eigen::Index M = advantages.rows();
  const Eigen::Index P = policy.layout().size();
  if (B == 0 || advantages.cols() != B || batch.pre_tanh.cols() != B ||
      batch.old_log_probs.size() != B || params.size() != P) {
    throw std::invalid_argument("clipped_surrogate: misaligned inputs");
  }

  Mlp::Tape tape;
  const Matrix mu = policy.pre_tanh_means(params, batch.states, &tape);
  const Vector log_std = policy.log_std(params);
  const Vector inv_var = (-2.0 * log_std).array().exp().matrix();

  Vector ratio(B);
  for (Eigen::Index t = 0; t < B; ++t) {
    const double lp = squashed_log_prob(mu.col(t), log_std, batch.pre_tanh.col(t));
    ratio(t) = std::exp(lp - batch.old_log_probs(t));
  }
  // d log pi / d mu and d log pi / d log_std.
  const Matrix diff = batch.pre_tanh - mu;
  const Matrix dmu = diff.array().colwise() * inv_var.array();
  const Matrix dls = (diff.array().square().colwise() * inv_var.array()) - 1.0;

  const Eigen::Index ls_off = policy.log_std_offset();
  const Eigen::Index A = log_std.size();
  const Vector raw_ls = params.segment(ls_off, A);

  SurrogateEval out;
  out.values.resize(M);
  out.grads = Matrix::Zero(M, P);
  const double lo = 1.0 - clip_ratio;
  const double hi = 1.0 + clip_ratio;
  for (Eigen::Index i = 0; i < M; ++i) {
    Vector w(B);
    double total = 0.0;
    for (Eigen::Index t = 0; t < B; ++t) {
      const double a = advantages(i, t);
      const double r = ratio(t);
      const double rc = std::clamp(r, lo, hi);
      const double unclipped = r * a;
      const double clipped = rc * a;
      total += std::min(unclipped, clipped);
      const bool flat = clipped < unclipped && (r < lo || r > hi);
      w(t) = flat ? 0.0 : a * r / static_cast<double>(B);
    }
    out.values(i) = total / static_cast<double>(B);

    Vector g = Vector::Zero(P);
    const Matrix adj = dmu.array().rowwise() * w.transpose().array();
    policy.trunk().backward(params, tape, adj, g);
    const Vector gls = dls * w;
    for (Eigen::Index a = 0; a < A; ++a) {
      if (raw_ls(a) >= kLogStdMin && raw_ls(a) <= kLogStdMax) g(ls_off + a) += gls(a);
    }
    out.grads.row(i) = g.transpose();
  }
  require_finite(out.grads, "subtask_policy_gradients");
  return out;
}

GradientStack subtask_policy_gradients(const GaussianPolicy& policy, const Vector& params,
                                       const Minibatch& batch, double clip_ratio) {
  return GradientStack(clipped_surrogate(policy, params, batch, batch.advantages, clip_ratio).grads);
}

double critic_loss(const MultiHeadCritic& critic, const Vector& params, const Matrix& states,
                   const Matrix& returns, Vector* gradient) {
  if (states.cols() != returns.cols() || returns.rows() != critic.subtasks() ||
      states.cols() == 0) {
    throw std::invalid_argument("critic_loss: misaligned inputs");
  }
  Mlp::Tape tape;
  const Matrix v = critic.forward_batch(params, states, gradient ? &tape : nullptr);
  const Matrix diff = v - returns;
  const double B = static_cast<double>(states.cols());
  const double loss = diff.squaredNorm() / B;
  if (!std::isfinite(loss)) throw AbortUpdate("critic_update: non-finite loss");
  if (gradient) {
    gradient->setZero(params.size());
    critic.net().backward(params, tape, (2.0 / B) * diff, *gradient);
    require_finite(*gradient, "critic_update");
  }
  return loss;
}

double critic_update(const MultiHeadCritic& critic, Vector& params, const Matrix& states,
                     const Matrix& returns, double lr) {
  Vector g;
  const double loss = critic_loss(critic, params, states, returns, &g);
  params -= lr * g;
  return loss;
}

ClippedSurrogateLoss::ClippedSurrogateLoss(const GaussianPolicy& policy, Minibatch batch,
                                           int subtask, double clip_ratio)
    : policy_(policy), batch_(std::move(batch)), subtask_(subtask), clip_ratio_(clip_ratio) {
  if (subtask_ < 0 || subtask_ >= batch_.advantages.rows()) {
    throw std::out_of_range("ClippedSurrogateLoss: subtask out of range");
  }
}

double ClippedSurrogateLoss::value(const Vector& params) const {
  return clipped_surrogate(policy_, params, batch_, batch_.advantages.row(subtask_), clip_ratio_)
      .values(0);
}

Vector ClippedSurrogateLoss::gradient(const Vector& params) const {
  return clipped_surrogate(policy_, params, batch_, batch_.advantages.row(subtask_), clip_ratio_)
      .grads.row(0)
      .transpose();
}

CriticMseLoss::CriticMseLoss(const MultiHeadCritic& critic, Matrix states, Matrix returns)
    : critic_(critic), states_(std::move(states)), returns_(std::move(returns)) {}

double CriticMseLoss::value(const Vector& params) const {
  return critic_loss(critic_, params, states_, returns_);
}

Vector CriticMseLoss::gradient(const Vector& params) const {
  Vector g;
  critic_loss(critic_, params, states_, returns_, &g);
  return g;
}

// ---------------------------------------------------------------------------
// Update

UpdateStats ppo_update(const RolloutBuffer& buffer, const AdvantageSet& adv,
                       const GaussianPolicy& policy, Vector& actor,
                       const MultiHeadCritic& critic, Vector& critic_params,
                       const TrainConfig& config, UpdateState& state,
                       const DirectionObserver& observer) {
  const int T = buffer.size();
  const int M = buffer.subtasks();
  if (T == 0) throw std::invalid_argument("ppo_update: empty buffer");
  if (config.minibatch < 1 || config.epochs < 1) {
    throw std::invalid_argument("ppo_update: minibatch and epochs must be positive");
  }
  if (config.bypass_lppg && M != 1) {
    throw std::invalid_argument("ppo_update: the LPPG bypass requires a single subtask");
  }
  const LppgConfig lppg = config.lppg();
  const Eigen::Index P = actor.size();

  UpdateStats stats;
  stats.surrogate = Vector::Zero(M);
  stats.used_levels.assign(static_cast<std::size_t>(M + 1), 0);
  stats.sampled_levels.assign(static_cast<std::size_t>(M + 1), 0);
  stats.min_relative_slack = std::numeric_limits<double>::infinity();
  double norm_sum = 0.0;
  double loss_sum = 0.0;
  double iter_sum = 0.0;

  std::vector<int> order(static_cast<std::size_t>(T));
  std::iota(order.begin(), order.end(), 0);
  const int mb = std::min(config.minibatch, T);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), state.shuffle);
    for (int start = 0; start + mb <= T; start += mb) {
      const std::vector<int> idx(order.begin() + start, order.begin() + start + mb);
      Minibatch batch = gather(buffer, adv, idx);
      if (config.normalize_advantages) batch.advantages = normalize_rows(batch.advantages);

      const auto t0 = Clock::now();
      SurrogateEval sur = clipped_surrogate(policy, actor, batch, batch.advantages,
                                            config.clip_ratio);
      const double grad_s = seconds_since(t0);
      stats.surrogate += sur.values;
      GradientStack stack(std::move(sur.grads));

      const auto t1 = Clock::now();
      DirectionResult dir;
      if (config.bypass_lppg) {
        dir.direction = stack.row(1);
        dir.sampled_level = 1;
        dir.used_level = dir.direction.norm() > trivial_norm_threshold(dir.direction) ? 1 : 0;
        if (dir.used_level == 0) dir.direction.setZero();
        dir.projection.converged = true;
      } else {
        std::optional<int> forced;
        if (!config.subproblem_exploration) forced = M;
        dir = lppg_direction(stack, state.subproblem, lppg, forced);
      }
      const double solve_s = seconds_since(t1);
      if (!dir.direction.allFinite()) throw AbortUpdate("ppo_update: non-finite direction");
      if (observer) observer(DirectionEvent{stack, dir, grad_s, solve_s});

      ++stats.lppg_calls;
      stats.fallback_steps += dir.fallback_steps;
      ++stats.used_levels[static_cast<std::size_t>(dir.used_level)];
      if (dir.sampled_level >= 1 && dir.sampled_level <= M) {
        ++stats.sampled_levels[static_cast<std::size_t>(dir.sampled_level)];
      }
      iter_sum += dir.projection.iterations;
      if (dir.used_level > 0 && !config.bypass_lppg && !dir.projection.converged) {
        ++stats.nonconverged;
        if (++state.consecutive_nonconverged > config.nonconverged_budget) {
          stats.nonconverged_warning = true;
        }
      } else {
        state.consecutive_nonconverged = 0;
      }

      const double dnorm = dir.direction.norm();
      norm_sum += dnorm;
      if (dir.used_level > 0) {
        stats.min_relative_slack = std::min(
            stats.min_relative_slack,
            min_relative_slack(stack, dir.direction, lppg.eps, dir.used_level));
        double scale = config.actor_lr;
        if (config.actor_step == ActorStep::kRms) {
          const double ms = dir.direction.squaredNorm() / static_cast<double>(P);
          ++state.rms_count;
          state.rms = config.rms_decay * state.rms + (1.0 - config.rms_decay) * ms;
          const double corrected =
              state.rms / (1.0 - std::pow(config.rms_decay, static_cast<double>(state.rms_count)));
          scale /= std::sqrt(corrected) + 1e-12;
        }
        actor += scale * dir.direction;
      }

      loss_sum += critic_update(critic, critic_params, batch.states, batch.returns,
                                config.critic_lr);
    }
  }
  const double calls = std::max(1, stats.lppg_calls);
  stats.surrogate /= calls;
  stats.direction_norm = norm_sum / calls;
  stats.critic_loss = loss_sum / calls;
  stats.dykstra_iterations = iter_sum / calls;
  require_finite(actor, "ppo_update");
  require_finite(critic_params, "ppo_update");
  return stats;
}

// ---------------------------------------------------------------------------
// Trainer

namespace {

const Environment& checked(const std::unique_ptr<Environment>& env) {
  if (!env) throw std::invalid_argument("Trainer: null environment");
  return *env;
}

}  // namespace

Trainer::Trainer(TrainConfig config, std::unique_ptr<Environment> env)
    : config_(std::move(config)),
      policy_(checked(env).observation_dim(), env->action_dim(), config_.actor_hidden),
      critic_(env->observation_dim(), env->subtasks(), config_.critic_hidden),
      update_state_{make_stream(config_.seed, Stream::kShuffle),
                    make_stream(config_.seed, Stream::kSubproblem)} {
  if (config_.batch < 1) throw std::invalid_argument("Trainer: batch must be positive");
  if (config_.workers < 1 || config_.workers > config_.batch) {
    throw std::invalid_argument("Trainer: workers must be in [1, batch]");
  }
  // Worker 0 uses the plain streams, so one worker matches the serial layout.
  for (int w = 0; w < config_.workers; ++w) {
    const std::uint64_t salt = w == 0 ? 0 : splitmix64(static_cast<std::uint64_t>(w));
    collectors_.emplace_back(w + 1 == config_.workers ? std::move(env) : env->clone(),
                             Rng(stream_seed(config_.seed, Stream::kEnv) ^ salt),
                             Rng(stream_seed(config_.seed, Stream::kAction) ^ salt));
  }
  const int M = critic_.subtasks();
  if (config_.eps.size() != 0 && config_.eps.size() != M) {
    throw std::invalid_argument("Trainer: eps must have one entry per subtask");
  }
  Rng init = make_stream(config_.seed, Stream::kInit);
  actor_ = policy_.initial_params(init).values;
  critic_params_ = critic_.initial_params(init).values;
}

UpdateRecord Trainer::iterate(const DirectionObserver& observer) {
  RolloutBuffer buf;
  if (collectors_.size() == 1) {
    buf = collectors_.front().collect(policy_, actor_, critic_, critic_params_, config_.batch);
  } else {
    const int W = static_cast<int>(collectors_.size());
    std::vector<RolloutBuffer> parts(collectors_.size());
    std::vector<std::exception_ptr> errors(collectors_.size());
    std::vector<std::thread> threads;
    for (int w = 0; w < W; ++w) {
      const int steps = config_.batch / W + (w < config_.batch % W ? 1 : 0);
      threads.emplace_back([&, w, steps] {
        try {
          parts[static_cast<std::size_t>(w)] = collectors_[static_cast<std::size_t>(w)].collect(
              policy_, actor_, critic_, critic_params_, steps);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    buf = concat_buffers(parts);
  }
  steps_ += static_cast<std::uint64_t>(buf.size());
  const AdvantageSet adv = compute_gae(buf, config_.gamma, config_.gae_lambda);

  UpdateRecord rec;
  rec.stats = ppo_update(buf, adv, policy_, actor_, critic_, critic_params_, config_,
                         update_state_, observer);
  rec.step = steps_;
  rec.update = ++updates_;
  std::vector<Vector> finished;
  for (auto& c : collectors_) {
    for (auto& r : c.take_finished_returns()) finished.push_back(std::move(r));
  }
  rec.episodes = static_cast<int>(finished.size());
  rec.episode_return = Vector::Constant(critic_.subtasks(), std::numeric_limits<double>::quiet_NaN());
  if (!finished.empty()) {
    rec.episode_return.setZero();
    for (const auto& r : finished) rec.episode_return += r;
    rec.episode_return /= static_cast<double>(finished.size());
  }
  return rec;
}

void Trainer::run(const std::function<void(const UpdateRecord&)>& on_update,
                  const DirectionObserver& observer) {
  do {
    const UpdateRecord rec = iterate(observer);
    if (on_update) on_update(rec);
  } while (steps_ < config_.total_steps);
}

// ---------------------------------------------------------------------------
// Evaluation

Matrix evaluate_policy(Environment& env, const GaussianPolicy& policy, const Vector& actor,
                       const EvalOptions& options,
                       const std::function<void(const EvalStep&)>& on_step) {
  if (options.episodes < 1) throw std::invalid_argument("evaluate_policy: episodes must be positive");
  Rng env_rng = make_stream(options.seed, Stream::kEval);
  Rng act_rng(env_rng());
  Rng noise_rng(env_rng());
  std::normal_distribution<double> noise(0.0, 1.0);
  Matrix returns = Matrix::Zero(options.episodes, env.subtasks());
  for (int ep = 0; ep < options.episodes; ++ep) {
    Vector obs = env.reset(env_rng);
    for (int t = 1;; ++t) {
      Vector seen = obs;
      if (options.obs_noise > 0.0) {
        for (Eigen::Index k = 0; k < std::min<Eigen::Index>(2, seen.size()); ++k) {
          seen(k) += options.obs_noise * noise(noise_rng);
        }
      }
      const ActionSample a =
          log_prob_and_sample(policy.forward(actor, seen), act_rng, options.deterministic);
      StepResult r = env.step(a.action);
      returns.row(ep) += r.rewards.transpose();
      if (on_step) on_step(EvalStep{ep, t, r.observation, a.action, r.rewards, r.done});
      obs = std::move(r.observation);
      if (r.done || r.truncated) break;
    }
  }
  return returns;
}

}  // namespace lexpg
