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

#include "lexpg/nnet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lexpg {

namespace {

using ConstMap = Eigen::Map<const Matrix>;
using MutMap = Eigen::Map<Matrix>;

ConstMap view(const Vector& params, const ParamBlock& b) {
  return ConstMap(params.data() + b.offset, b.rows, b.cols);
}

MutMap view(Vector& params, const ParamBlock& b) {
  return MutMap(params.data() + b.offset, b.rows, b.cols);
}

Matrix orthogonal(Eigen::Index rows, Eigen::Index cols, double gain, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const bool flip = rows < cols;
  const Eigen::Index r = flip ? cols : rows;
  const Eigen::Index c = flip ? rows : cols;
  Matrix a(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) a(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(r, c);
  const Matrix rr = qr.matrixQR().topRows(c).template triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < c; ++j) {
    if (rr(j, j) < 0.0) q.col(j) *= -1.0;
  }
  Matrix w = flip ? Matrix(q.transpose()) : q;
  return gain * w;
}

// log(1 - tanh(u)^2), stable for large |u|.
double log_one_minus_tanh_sq(double u) {
  const double a = std::abs(u);
  return 2.0 * (std::numbers::ln2 - a - std::log1p(std::exp(-2.0 * a)));
}

void check_state(const Vector& state, int expected, const char* what) {
  if (state.size() != expected) {
    throw std::invalid_argument(std::string(what) + ": state has dimension " +
                                std::to_string(state.size()) + ", expected " +
                                std::to_string(expected));
  }
}

}  // namespace

Eigen::Index MlpSpec::param_count() const {
  Eigen::Index total = 0;
  int prev = input_dim;
  for (int h : hidden) {
    total += static_cast<Eigen::Index>(h) * prev + h;
    prev = h;
  }
  total += static_cast<Eigen::Index>(output_dim) * prev + output_dim;
  return total;
}

Eigen::Index ParamLayout::add(std::string name, Eigen::Index rows, Eigen::Index cols) {
  ParamBlock b{std::move(name), size_, rows, cols};
  size_ += b.size();
  blocks_.push_back(b);
  return b.offset;
}

const ParamBlock& ParamLayout::find(const std::string& name) const {
  for (const auto& b : blocks_) {
    if (b.name == name) return b;
  }
  throw std::out_of_range("ParamLayout: no block named '" + name + "'");
}

Mlp::Mlp(MlpSpec spec, ParamLayout& layout, const std::string& prefix)
    : spec_(std::move(spec)) {
  if (spec_.input_dim < 1 || spec_.output_dim < 1) {
    throw std::invalid_argument("Mlp: input and output dimensions must be >= 1");
  }
  int prev = spec_.input_dim;
  std::vector<int> widths = spec_.hidden;
  widths.push_back(spec_.output_dim);
  for (std::size_t l = 0; l < widths.size(); ++l) {
    if (widths[l] < 1) throw std::invalid_argument("Mlp: layer widths must be >= 1");
    const std::string tag = prefix + (l + 1 == widths.size() ? "out" : std::to_string(l));
    layout.add(tag + ".weight", widths[l], prev);
    weight_.push_back(layout.blocks().back());
    layout.add(tag + ".bias", widths[l], 1);
    bias_.push_back(layout.blocks().back());
    prev = widths[l];
  }
}

Matrix Mlp::forward(const Vector& params, const Matrix& input, Tape* tape) const {
  if (input.rows() != spec_.input_dim) {
    throw std::invalid_argument("Mlp::forward: input has " + std::to_string(input.rows()) +
                                " rows, expected " + std::to_string(spec_.input_dim));
  }
  if (tape) tape->inputs.clear();
  Matrix a = input;
  for (std::size_t l = 0; l < weight_.size(); ++l) {
    Matrix z = view(params, weight_[l]) * a;
    z.colwise() += view(params, bias_[l]).col(0);
    if (tape) tape->inputs.push_back(std::move(a));
    if (l + 1 < weight_.size()) {
      a = z.array().tanh().matrix();
    } else {
      return z;
    }
  }
  return a;
}

void Mlp::backward(const Vector& params, const Tape& tape, const Matrix& output_adjoint,
                   Vector& grad) const {
  Matrix delta = output_adjoint;
  for (std::size_t k = weight_.size(); k-- > 0;) {
    const Matrix& a = tape.inputs[k];
    view(grad, weight_[k]).noalias() += delta * a.transpose();
    view(grad, bias_[k]).col(0) += delta.rowwise().sum();
    if (k > 0) {
      Matrix back = view(params, weight_[k]).transpose() * delta;
      delta = (back.array() * (1.0 - a.array().square())).matrix();
    }
  }
}

void Mlp::initialize(Vector& params, Rng& rng, double hidden_gain, double output_gain) const {
  for (std::size_t l = 0; l < weight_.size(); ++l) {
    const double gain = l + 1 < weight_.size() ? hidden_gain : output_gain;
    view(params, weight_[l]) = orthogonal(weight_[l].rows, weight_[l].cols, gain, rng);
    view(params, bias_[l]).setZero();
  }
}

void Mlp::zero_output_layer(Vector& params) const {
  view(params, weight_.back()).setZero();
  view(params, bias_.back()).setZero();
}

GaussianPolicy::GaussianPolicy(int state_dim, int action_dim, std::vector<int> hidden)
    : trunk_(MlpSpec{state_dim, std::move(hidden), action_dim}, layout_, "actor.") {
  layout_.add("actor.log_std", action_dim, 1);
  log_std_ = layout_.blocks().back();
}

ParamVector GaussianPolicy::initial_params(Rng& rng) const {
  ParamVector p{Vector::Zero(layout_.size()), layout_};
  trunk_.initialize(p.values, rng, std::numbers::sqrt2, 0.01);
  return p;
}

Vector GaussianPolicy::log_std(const Vector& params) const {
  return view(params, log_std_).col(0).cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
}

Matrix GaussianPolicy::pre_tanh_means(const Vector& params, const Matrix& states,
                                      Mlp::Tape* tape) const {
  return trunk_.forward(params, states, tape);
}

PolicyOutput GaussianPolicy::forward(const Vector& params, const Vector& state) const {
  check_state(state, state_dim(), "policy_forward");
  PolicyOutput out;
  out.pre_tanh_mean = trunk_.forward(params, state).col(0);
  out.mean = out.pre_tanh_mean.array().tanh().matrix();
  out.log_std = log_std(params);
  return out;
}

MultiHeadCritic::MultiHeadCritic(int state_dim, int subtasks, std::vector<int> hidden)
    : net_(MlpSpec{state_dim, std::move(hidden), subtasks}, layout_, "critic.") {}

ParamVector MultiHeadCritic::initial_params(Rng& rng) const {
  ParamVector p{Vector::Zero(layout_.size()), layout_};
  net_.initialize(p.values, rng, std::numbers::sqrt2, 1.0);
  return p;
}

Vector MultiHeadCritic::forward(const Vector& params, const Vector& state) const {
  check_state(state, state_dim(), "critic_forward");
  return net_.forward(params, state).col(0);
}

Matrix MultiHeadCritic::forward_batch(const Vector& params, const Matrix& states,
                                      Mlp::Tape* tape) const {
  return net_.forward(params, states, tape);
}

PolicyOutput policy_forward(const GaussianPolicy& policy, const Vector& params,
                            const Vector& state) {
  return policy.forward(params, state);
}

double squashed_log_prob(const Vector& pre_tanh_mean, const Vector& log_std,
                         const Vector& pre_tanh_sample) {
  constexpr double kHalfLog2Pi = 0.91893853320467274178;
  double lp = 0.0;
  for (Eigen::Index i = 0; i < pre_tanh_sample.size(); ++i) {
    const double z = (pre_tanh_sample(i) - pre_tanh_mean(i)) * std::exp(-log_std(i));
    lp += -0.5 * z * z - log_std(i) - kHalfLog2Pi;
    lp -= log_one_minus_tanh_sq(pre_tanh_sample(i));
  }
  return lp;
}

ActionSample log_prob_and_sample(const PolicyOutput& out, Rng& rng, bool deterministic) {
  if (out.pre_tanh_mean.size() != out.log_std.size()) {
    throw std::invalid_argument("log_prob_and_sample: mean/log_std size mismatch");
  }
  ActionSample s;
  s.pre_tanh = out.pre_tanh_mean;
  if (!deterministic) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < s.pre_tanh.size(); ++i) {
      s.pre_tanh(i) += std::exp(out.log_std(i)) * normal(rng);
    }
  }
  s.action = s.pre_tanh.array().tanh().matrix();
  s.log_prob = squashed_log_prob(out.pre_tanh_mean, out.log_std, s.pre_tanh);
  return s;
}

Vector critic_forward(const MultiHeadCritic& critic, const Vector& params,
                      const Vector& state) {
  return critic.forward(params, state);
}

Vector grad(const DifferentiableLoss& loss, const Vector& params) {
  if (params.size() != loss.dim()) {
    throw std::invalid_argument("grad: parameter vector does not match the loss");
  }
  return loss.gradient(params);
}

}  // namespace lexpg
