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

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "test_util.hpp"

namespace lexpg {
namespace {

using testing::gaussian;
using testing::vec;

// Sum of squares of the network output; exercises every layer.
class OutputEnergy final : public DifferentiableLoss {
 public:
  OutputEnergy(const Mlp& net, Eigen::Index dim, Matrix input)
      : net_(net), dim_(dim), input_(std::move(input)) {}
  Eigen::Index dim() const override { return dim_; }
  double value(const Vector& p) const override {
    return 0.5 * net_.forward(p, input_).squaredNorm();
  }
  Vector gradient(const Vector& p) const override {
    Mlp::Tape tape;
    const Matrix out = net_.forward(p, input_, &tape);
    Vector g = Vector::Zero(dim_);
    net_.backward(p, tape, out, g);
    return g;
  }

 private:
  const Mlp& net_;
  Eigen::Index dim_;
  Matrix input_;
};

TEST(MlpSpec, ParamCount) {
  EXPECT_EQ((MlpSpec{4, {64, 64, 64}, 2}.param_count()), 4 * 64 + 64 + 2 * 64 * 64 + 2 * 64 + 64 * 2 + 2);
  EXPECT_EQ((MlpSpec{3, {}, 1}.param_count()), 4);
}

TEST(ParamLayout, BlocksAreContiguous) {
  GaussianPolicy policy(4, 2);
  Eigen::Index next = 0;
  for (const auto& b : policy.layout().blocks()) {
    EXPECT_EQ(b.offset, next);
    next += b.size();
  }
  EXPECT_EQ(next, policy.layout().size());
  EXPECT_EQ(policy.layout().size(), (MlpSpec{4, {64, 64, 64}, 2}.param_count()) + 2);
  EXPECT_EQ(policy.layout().find("actor.log_std").size(), 2);
  EXPECT_THROW(policy.layout().find("nope"), std::out_of_range);
}

TEST(Mlp, RejectsBadShapes) {
  ParamLayout layout;
  EXPECT_THROW(Mlp(MlpSpec{0, {4}, 1}, layout, "x."), std::invalid_argument);
  ParamLayout l2;
  Mlp net(MlpSpec{3, {4}, 2}, l2, "x.");
  EXPECT_THROW(net.forward(Vector::Zero(l2.size()), Matrix::Zero(2, 1)), std::invalid_argument);
}

TEST(Mlp, OrthogonalInitialization) {
  ParamLayout layout;
  Mlp net(MlpSpec{5, {8, 8}, 3}, layout, "n.");
  Vector p = Vector::Zero(layout.size());
  Rng rng(4);
  net.initialize(p, rng, 2.0, 0.5);
  const auto& w0 = layout.find("n.0.weight");
  const Eigen::Map<const Matrix> W0(p.data() + w0.offset, w0.rows, w0.cols);
  // 8x5 with orthonormal columns scaled by the gain.
  EXPECT_LE((W0.transpose() * W0 - 4.0 * Matrix::Identity(5, 5)).norm(), 1e-10);
  const auto& wo = layout.find("n.out.weight");
  const Eigen::Map<const Matrix> Wo(p.data() + wo.offset, wo.rows, wo.cols);
  EXPECT_LE((Wo * Wo.transpose() - 0.25 * Matrix::Identity(3, 3)).norm(), 1e-10);
  const auto& b0 = layout.find("n.0.bias");
  EXPECT_EQ(p.segment(b0.offset, b0.size()).norm(), 0.0);
}

TEST(Mlp, BackwardMatchesFiniteDifferences) {
  ParamLayout layout;
  Mlp net(MlpSpec{4, {16, 16, 16}, 3}, layout, "n.");
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    Vector p = Vector::Zero(layout.size());
    net.initialize(p, rng, std::sqrt(2.0), 1.0);
    p += gaussian(p.size(), rng, 0.05);
    OutputEnergy loss(net, layout.size(), gaussian(4, 7, rng));
    const auto rep = testing::finite_difference_check(loss, p, rng);
    EXPECT_LE(rep.max_rel_error, 1e-4) << "seed " << seed;
  }
}

TEST(Grad, QuadraticIdentity) {
  Rng rng(1);
  const Vector p = gaussian(9, rng);
  EXPECT_EQ(grad(SquaredNormLoss(9), p), p);
}

TEST(Grad, ConstantLossHasZeroGradient) {
  EXPECT_EQ(grad(ConstantLoss(5, 3.0), Vector::Ones(5)), Vector::Zero(5));
}

TEST(Grad, RejectsWrongDimension) {
  EXPECT_THROW(grad(SquaredNormLoss(3), Vector::Zero(4)), std::invalid_argument);
}

TEST(PolicyForward, ZeroOutputLayerGivesZeroMean) {
  GaussianPolicy policy(4, 2);
  Rng rng(2);
  Vector p = policy.initial_params(rng).values;
  policy.trunk().zero_output_layer(p);
  const PolicyOutput out = policy_forward(policy, p, vec({1, 2, 9, 9}));
  EXPECT_EQ(out.mean, Vector::Zero(2));
  EXPECT_EQ(out.log_std, Vector::Zero(2));
}

TEST(PolicyForward, PureAndDeterministic) {
  GaussianPolicy policy(6, 2);
  Rng rng(3);
  const Vector p = policy.initial_params(rng).values;
  const Vector s = vec({1, 2, 7, 9, 9, 7});
  const PolicyOutput a = policy_forward(policy, p, s);
  const PolicyOutput b = policy_forward(policy, p, s);
  EXPECT_EQ(std::memcmp(a.mean.data(), b.mean.data(), 2 * sizeof(double)), 0);
  EXPECT_EQ(a.pre_tanh_mean, b.pre_tanh_mean);
}

TEST(PolicyForward, RandomizedParamsStayInRange) {
  GaussianPolicy policy(4, 2, {16, 16});
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector p = gaussian(policy.layout().size(), rng, 1.0 + trial % 5);
    const PolicyOutput out = policy_forward(policy, p, gaussian(4, rng, 10.0));
    ASSERT_TRUE(out.mean.allFinite());
    EXPECT_LE(out.mean.cwiseAbs().maxCoeff(), 1.0);
    EXPECT_GE(out.log_std.minCoeff(), kLogStdMin);
    EXPECT_LE(out.log_std.maxCoeff(), kLogStdMax);
  }
}

TEST(PolicyForward, LogStdIsClamped) {
  GaussianPolicy policy(2, 2, {4});
  Vector p = Vector::Zero(policy.layout().size());
  p(policy.log_std_offset()) = -9.0;
  p(policy.log_std_offset() + 1) = 7.0;
  const PolicyOutput out = policy_forward(policy, p, vec({0, 0}));
  EXPECT_EQ(out.log_std, vec({kLogStdMin, kLogStdMax}));
}

TEST(PolicyForward, RejectsWrongStateDimension) {
  GaussianPolicy policy(4, 2);
  Rng rng(1);
  EXPECT_THROW(policy_forward(policy, policy.initial_params(rng).values, vec({1, 2})),
               std::invalid_argument);
}

TEST(Sampling, DeterministicModeReturnsMean) {
  PolicyOutput out{vec({0.3, -1.2}), vec({std::tanh(0.3), std::tanh(-1.2)}), vec({-5, -5})};
  Rng rng(1);
  const ActionSample s = log_prob_and_sample(out, rng, true);
  EXPECT_EQ(s.action, out.mean);
  const ActionSample noisy = log_prob_and_sample(out, rng, false);
  EXPECT_LE((noisy.action - out.mean).cwiseAbs().maxCoeff(), 0.1);
}

TEST(Sampling, LogProbMatchesDirectDensity) {
  Rng rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    PolicyOutput out;
    out.pre_tanh_mean = gaussian(3, rng, 0.7);
    out.mean = out.pre_tanh_mean.array().tanh().matrix();
    out.log_std = gaussian(3, rng, 0.3);
    const ActionSample s = log_prob_and_sample(out, rng);
    double direct = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double sd = std::exp(out.log_std(i));
      const double u = s.pre_tanh(i);
      const double z = (u - out.pre_tanh_mean(i)) / sd;
      const double a = std::tanh(u);
      direct += std::log(std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI)) / (1.0 - a * a));
    }
    EXPECT_NEAR(s.log_prob, direct, 1e-9 * std::max(1.0, std::abs(direct)));
    EXPECT_EQ(s.action, s.pre_tanh.array().tanh().matrix());
  }
}

TEST(Sampling, StableForSaturatedActions) {
  const double lp = squashed_log_prob(vec({30.0}), vec({0.0}), vec({30.0}));
  EXPECT_TRUE(std::isfinite(lp));
  // log(1 - tanh(30)^2) = log(4) - 60 - 2 log(1 + e^-60).
  EXPECT_NEAR(lp, -0.5 * std::log(2.0 * M_PI) - (std::log(4.0) - 60.0), 1e-9);
}

TEST(Sampling, MonteCarloMeanMatchesPushforward) {
  const double mu = 0.4;
  const double log_sd = std::log(0.8);
  PolicyOutput out{vec({mu}), vec({std::tanh(mu)}), vec({log_sd})};
  Rng rng(2025);
  const int n = 100000;
  double sum = 0.0;
  double sq = 0.0;
  for (int k = 0; k < n; ++k) {
    const double a = log_prob_and_sample(out, rng).action(0);
    sum += a;
    sq += a * a;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  // E[tanh(u)] by trapezoid quadrature over +-10 sigma.
  const double sigma = std::exp(log_sd);
  double expect = 0.0;
  const int grid = 200000;
  const double lo = mu - 10 * sigma;
  const double h = 20 * sigma / grid;
  for (int i = 0; i <= grid; ++i) {
    const double u = lo + i * h;
    const double w = (i == 0 || i == grid) ? 0.5 : 1.0;
    expect += w * std::tanh(u) * std::exp(-0.5 * std::pow((u - mu) / sigma, 2));
  }
  expect *= h / (sigma * std::sqrt(2.0 * M_PI));
  EXPECT_NEAR(mean, expect, 3.0 * sd / std::sqrt(static_cast<double>(n)));
}

TEST(Critic, OutputShapeAndScalarCase) {
  MultiHeadCritic critic(4, 1);
  Rng rng(1);
  const Vector p = critic.initial_params(rng).values;
  EXPECT_EQ(critic_forward(critic, p, vec({1, 1, 9, 9})).size(), 1);
  MultiHeadCritic c5(4, 5);
  EXPECT_EQ(critic_forward(c5, c5.initial_params(rng).values, vec({1, 1, 9, 9})).size(), 5);
}

TEST(Critic, ZeroHeadsGiveZeroValues) {
  MultiHeadCritic critic(4, 3);
  Rng rng(1);
  Vector p = critic.initial_params(rng).values;
  critic.net().zero_output_layer(p);
  EXPECT_EQ(critic_forward(critic, p, vec({0.5, 3, 9, 9})), Vector::Zero(3));
}

TEST(Critic, FiniteUnderRandomInputs) {
  MultiHeadCritic critic(6, 4);
  Rng rng(9);
  const Vector p = critic.initial_params(rng).values;
  for (int trial = 0; trial < 200; ++trial) {
    EXPECT_TRUE(critic_forward(critic, p, gaussian(6, rng, 20.0)).allFinite());
  }
  EXPECT_THROW(critic_forward(critic, p, vec({1})), std::invalid_argument);
}

TEST(Critic, BatchMatchesSingle) {
  MultiHeadCritic critic(4, 3);
  Rng rng(3);
  const Vector p = critic.initial_params(rng).values;
  const Matrix states = gaussian(4, 9, rng, 3.0);
  const Matrix batch = critic.forward_batch(p, states);
  for (Eigen::Index t = 0; t < states.cols(); ++t) {
    EXPECT_LE((batch.col(t) - critic_forward(critic, p, states.col(t))).norm(), 1e-12);
  }
}

}  // namespace
}  // namespace lexpg
