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

#ifndef LEXPG_NNET_HPP_
#define LEXPG_NNET_HPP_

#include <string>
#include <vector>

#include "lexpg/projection.hpp"
#include "lexpg/random.hpp"

namespace lexpg {

enum class Activation { kTanh = 0 };

struct MlpSpec {
  int input_dim = 0;
  std::vector<int> hidden{64, 64, 64};
  int output_dim = 0;
  Activation activation = Activation::kTanh;

  Eigen::Index param_count() const;
  bool operator==(const MlpSpec&) const = default;
};

/// A named contiguous range of a flat parameter vector. Weight blocks are
/// column-major `rows x cols` matrices; bias blocks have cols == 1.
struct ParamBlock {
  std::string name;
  Eigen::Index offset = 0;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Eigen::Index size() const { return rows * cols; }
};

class ParamLayout {
 public:
  Eigen::Index add(std::string name, Eigen::Index rows, Eigen::Index cols);
  const ParamBlock& find(const std::string& name) const;
  const std::vector<ParamBlock>& blocks() const { return blocks_; }
  Eigen::Index size() const { return size_; }

 private:
  std::vector<ParamBlock> blocks_;
  Eigen::Index size_ = 0;
};

/// Flat parameter storage with its layout. values.size() == layout.size().
struct ParamVector {
  Vector values;
  ParamLayout layout;
};

/// Fully connected network: tanh on hidden layers, linear output.
class Mlp {
 public:
  /// Activations kept from a forward pass: inputs[l] feeds layer l.
  struct Tape {
    std::vector<Matrix> inputs;
  };

  Mlp(MlpSpec spec, ParamLayout& layout, const std::string& prefix);

  const MlpSpec& spec() const { return spec_; }
  std::size_t layers() const { return weight_.size(); }

  /// Column-per-sample forward pass. Output is output_dim x batch.
  Matrix forward(const Vector& params, const Matrix& input, Tape* tape = nullptr) const;

  /// Accumulates d(loss)/d(params) into `grad` given d(loss)/d(output).
  void backward(const Vector& params, const Tape& tape, const Matrix& output_adjoint,
                Vector& grad) const;

  /// Orthogonal weights (gain per layer), zero biases.
  void initialize(Vector& params, Rng& rng, double hidden_gain, double output_gain) const;

  /// Zeroes the final layer (weights and bias).
  void zero_output_layer(Vector& params) const;

 private:
  MlpSpec spec_;
  std::vector<ParamBlock> weight_;
  std::vector<ParamBlock> bias_;
};

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

struct PolicyOutput {
  Vector pre_tanh_mean;  // location of the Gaussian before squashing
  Vector mean;           // tanh(pre_tanh_mean), the deterministic action
  Vector log_std;        // clamped to [kLogStdMin, kLogStdMax]
};

struct ActionSample {
  Vector action;    // in (-1, 1)
  Vector pre_tanh;  // atanh(action)
  double log_prob = 0.0;
};

/// tanh-squashed diagonal Gaussian with a state-independent log-std.
class GaussianPolicy {
 public:
  GaussianPolicy(int state_dim, int action_dim, std::vector<int> hidden = {64, 64, 64});

  int state_dim() const { return trunk_.spec().input_dim; }
  int action_dim() const { return trunk_.spec().output_dim; }
  const Mlp& trunk() const { return trunk_; }
  const ParamLayout& layout() const { return layout_; }
  Eigen::Index log_std_offset() const { return log_std_.offset; }

  ParamVector initial_params(Rng& rng) const;

  PolicyOutput forward(const Vector& params, const Vector& state) const;
  /// Pre-tanh means, action_dim x batch.
  Matrix pre_tanh_means(const Vector& params, const Matrix& states,
                        Mlp::Tape* tape = nullptr) const;
  Vector log_std(const Vector& params) const;

 private:
  ParamLayout layout_;
  Mlp trunk_;
  ParamBlock log_std_;
};

/// Shared trunk with one linear value head per subtask.
class MultiHeadCritic {
 public:
  MultiHeadCritic(int state_dim, int subtasks, std::vector<int> hidden = {64, 64, 64});

  int state_dim() const { return net_.spec().input_dim; }
  int subtasks() const { return net_.spec().output_dim; }
  const Mlp& net() const { return net_; }
  const ParamLayout& layout() const { return layout_; }

  ParamVector initial_params(Rng& rng) const;
  Vector forward(const Vector& params, const Vector& state) const;
  /// subtasks x batch.
  Matrix forward_batch(const Vector& params, const Matrix& states,
                       Mlp::Tape* tape = nullptr) const;

 private:
  ParamLayout layout_;
  Mlp net_;
};

PolicyOutput policy_forward(const GaussianPolicy& policy, const Vector& params,
                            const Vector& state);

/// Samples u ~ N(pre_tanh_mean, exp(log_std)^2), a = tanh(u). The returned
/// log_prob is the exact density of `action` including the tanh Jacobian.
/// Deterministic mode returns a = tanh(pre_tanh_mean).
ActionSample log_prob_and_sample(const PolicyOutput& out, Rng& rng,
                                 bool deterministic = false);

/// log density of a = tanh(u) under the squashed Gaussian.
double squashed_log_prob(const Vector& pre_tanh_mean, const Vector& log_std,
                         const Vector& pre_tanh_sample);

Vector critic_forward(const MultiHeadCritic& critic, const Vector& params,
                      const Vector& state);

/// Scalar function of a parameter vector with an exact gradient.
class DifferentiableLoss {
 public:
  virtual ~DifferentiableLoss() = default;
  virtual Eigen::Index dim() const = 0;
  virtual double value(const Vector& params) const = 0;
  virtual Vector gradient(const Vector& params) const = 0;
};

class SquaredNormLoss final : public DifferentiableLoss {
 public:
  explicit SquaredNormLoss(Eigen::Index dim) : dim_(dim) {}
  Eigen::Index dim() const override { return dim_; }
  double value(const Vector& params) const override { return 0.5 * params.squaredNorm(); }
  Vector gradient(const Vector& params) const override { return params; }

 private:
  Eigen::Index dim_;
};

class ConstantLoss final : public DifferentiableLoss {
 public:
  ConstantLoss(Eigen::Index dim, double c) : dim_(dim), c_(c) {}
  Eigen::Index dim() const override { return dim_; }
  double value(const Vector&) const override { return c_; }
  Vector gradient(const Vector&) const override { return Vector::Zero(dim_); }

 private:
  Eigen::Index dim_;
  double c_;
};

Vector grad(const DifferentiableLoss& loss, const Vector& params);

}  // namespace lexpg

#endif  // LEXPG_NNET_HPP_
