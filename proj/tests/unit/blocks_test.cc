// Copyright 2026 The longgen Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "longgen/blocks/attention.h"
#include "longgen/blocks/mlp.h"
#include "longgen/blocks/recurrent_block.h"
#include "longgen/core/errors.h"
#include "longgen/core/weights.h"
#include "test_util.h"

namespace longgen::blocks {
namespace {

using MatD = Eigen::MatrixXd;
using VecD = Eigen::VectorXd;

Matrix random_matrix(int rows, int cols, std::mt19937_64& rng,
                     double stddev = 1.0) {
  std::normal_distribution<float> n(0.0f, static_cast<float>(stddev));
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

double gelu_d(double x) {
  return 0.5 * x *
         (1.0 + std::tanh(std::sqrt(2.0 / M_PI) * (x + 0.044715 * x * x * x)));
}
double sigmoid_d(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double softplus_d(double x) { return std::log1p(std::exp(x)); }

// Direct transcription of the recurrent block in double precision.
MatD recurrent_oracle(const Matrix& xf, const RecurrentBlockParams& p) {
  const MatD x = xf.cast<double>();
  const MatD pre = p.branch_b.cast<double>() * x;
  const MatD left = (p.branch_a.cast<double>() * x).unaryExpr(&gelu_d);
  const int R = p.recurrence_dim();
  MatD mixed(R, x.cols());
  VecD h = VecD::Zero(R);
  for (Eigen::Index t = 0; t < x.cols(); ++t) {
    VecD c = p.conv_bias.cast<double>();
    for (int k = 0; k < p.conv_width(); ++k) {
      if (t - k < 0) break;
      c += p.conv_weight.col(k).cast<double>().cwiseProduct(pre.col(t - k));
    }
    const VecD r = p.gate_a.cast<double>() * c + p.gate_a_bias.cast<double>();
    const VecD i = p.gate_x.cast<double>() * c + p.gate_x_bias.cast<double>();
    for (int ch = 0; ch < R; ++ch) {
      const double a = std::exp(-p.gate_constant * softplus_d(p.decay(ch)) *
                                sigmoid_d(r(ch)));
      h(ch) = a * h(ch) + std::sqrt(1.0 - a * a) * sigmoid_d(i(ch)) * c(ch);
    }
    mixed.col(t) = left.col(t).cwiseProduct(h);
  }
  return p.out.cast<double>() * mixed;
}

// Masked band attention: position t sees keys in [lo(t), t].
MatD attention_oracle(const Matrix& xf, const AttentionParams& p,
                      std::optional<int> window) {
  const MatD x = xf.cast<double>();
  const MatD q = p.q.cast<double>() * x;
  const MatD k = p.k.cast<double>() * x;
  const MatD v = p.v.cast<double>() * x;
  const int hd = p.head_dim;
  MatD heads(q.rows(), x.cols());
  for (Eigen::Index t = 0; t < x.cols(); ++t) {
    const Eigen::Index lo = window ? std::max<Eigen::Index>(0, t - *window) : 0;
    for (int h = 0; h < p.num_heads; ++h) {
      const VecD qh = q.block(h * hd, t, hd, 1);
      VecD w(t - lo + 1);
      for (Eigen::Index s = lo; s <= t; ++s) {
        w(s - lo) = qh.dot(k.col(s)) / std::sqrt(static_cast<double>(hd));
      }
      w = (w.array() - w.maxCoeff()).exp();
      w /= w.sum();
      VecD out = VecD::Zero(hd);
      for (Eigen::Index s = lo; s <= t; ++s) out += w(s - lo) * v.col(s);
      heads.block(h * hd, t, hd, 1) = out;
    }
  }
  return p.o.cast<double>() * heads;
}

class BlocksTest : public ::testing::Test {
 protected:
  void SetUp() override {
    params_ = init_random_weights(config_, 17);
    recurrent_ = RecurrentBlockParams::load(
        params_, "superblock.0.0.recurrent.",
        static_cast<float>(config_.recurrence_gate_constant));
    attention_ = AttentionParams::load(params_, "superblock.0.2.local_attention.",
                                       config_.num_query_heads,
                                       config_.head_dim);
    mlp_ = MlpParams::load(params_, "superblock.0.0.mlp.");
  }

  ModelConfig config_ = testing::tiny_config();
  ParameterSet params_;
  RecurrentBlockParams recurrent_;
  AttentionParams attention_;
  MlpParams mlp_;
  std::mt19937_64 rng_{23};
};

TEST_F(BlocksTest, ZeroRecurrentWeightsGiveZeroOutput) {
  const auto p = RecurrentBlockParams::zeros(8, 8, 4, 8.0f);
  auto state = make_recurrent_state(p);
  for (int t = 0; t < 20; ++t) {
    const Vector y = recurrent_block_step(random_matrix(8, 1, rng_).col(0),
                                          state, p);
    EXPECT_EQ(y, Vector::Zero(8));
  }
  EXPECT_EQ(state.h, Vector::Zero(8));
}

TEST_F(BlocksTest, RecurrentParallelMatchesOracle) {
  const Matrix x = random_matrix(config_.model_dim, 150, rng_);
  const MatD oracle = recurrent_oracle(x, recurrent_);
  const MatD got = recurrent_block_parallel(x, recurrent_).cast<double>();
  EXPECT_LE((got - oracle).cwiseAbs().maxCoeff(),
            1e-4 * std::max(1.0, oracle.cwiseAbs().maxCoeff()));
}

TEST_F(BlocksTest, RecurrentStepMatchesParallel) {
  const Matrix x = random_matrix(config_.model_dim, 200, rng_);
  const Matrix parallel = recurrent_block_parallel(x, recurrent_);
  auto state = make_recurrent_state(recurrent_);
  for (Eigen::Index t = 0; t < x.cols(); ++t) {
    const Vector y = recurrent_block_step(x.col(t), state, recurrent_);
    EXPECT_LE((y - parallel.col(t)).cwiseAbs().maxCoeff(), 1e-5)
        << "step " << t;
  }
}

TEST_F(BlocksTest, RecurrentBatchMatchesSingleLanes) {
  const Matrix x0 = random_matrix(config_.model_dim, 30, rng_);
  const Matrix x1 = random_matrix(config_.model_dim, 30, rng_);
  auto a = make_recurrent_state(recurrent_);
  auto b = make_recurrent_state(recurrent_);
  auto solo = make_recurrent_state(recurrent_);
  for (Eigen::Index t = 0; t < 30; ++t) {
    Matrix x(config_.model_dim, 2);
    x.col(0) = x0.col(t);
    x.col(1) = x1.col(t);
    RecurrentBlockState* lanes[] = {&a, &b};
    const Matrix y = recurrent_block_step_batch(x, lanes, recurrent_);
    EXPECT_LE((y.col(1) - recurrent_block_step(x1.col(t), solo, recurrent_))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-6);
  }
}

TEST_F(BlocksTest, RecurrentStateBytesConstant) {
  auto state = make_recurrent_state(recurrent_);
  const std::size_t before = state.bytes();
  EXPECT_EQ(before, static_cast<std::size_t>(config_.model_dim *
                                             config_.conv_width * 4));
  for (int t = 0; t < 50; ++t) {
    recurrent_block_step(random_matrix(config_.model_dim, 1, rng_).col(0),
                         state, recurrent_);
  }
  EXPECT_EQ(state.bytes(), before);
}

TEST_F(BlocksTest, RecurrentStateStaysFiniteOverLongRuns) {
  auto state = make_recurrent_state(recurrent_);
  std::normal_distribution<float> n(0.0f, 1.0f);
  Vector x(config_.model_dim);
  for (int t = 0; t < 100000; ++t) {
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = n(rng_);
    recurrent_block_step(x, state, recurrent_);
    if (t % 1000 == 0) ASSERT_TRUE(state.h.allFinite()) << t;
  }
  EXPECT_TRUE(state.h.allFinite());
  // |h| stays within the input envelope of a contraction.
  EXPECT_LT(state.h.cwiseAbs().maxCoeff(), 1e3);
}

TEST_F(BlocksTest, GatedDecayStrictlyInsideUnitInterval) {
  const Matrix c = random_matrix(config_.model_dim, 64, rng_, 3.0);
  const GatedInputs g = gate_recurrence_inputs(c, recurrent_);
  EXPECT_GT(g.a.minCoeff(), 0.0f);
  EXPECT_LT(g.a.maxCoeff(), 1.0f);
}

TEST_F(BlocksTest, RecurrentRejectsWrongWidth) {
  auto state = make_recurrent_state(recurrent_);
  EXPECT_THROW(recurrent_block_step(Vector::Zero(3), state, recurrent_),
               InvalidArgument);
}

TEST_F(BlocksTest, FirstAttentionStepReturnsProjectedValue) {
  auto state = make_attention_state(config_.head_dim, config_.attention_window);
  const Vector x = random_matrix(config_.model_dim, 1, rng_).col(0);
  const Vector y = local_mqa_step(x, state, attention_);
  // A single key gets weight one, so every head returns v.
  const Vector v = attention_.v * x;
  Vector heads(attention_.q.rows());
  for (int h = 0; h < attention_.num_heads; ++h) {
    heads.segment(h * attention_.head_dim, attention_.head_dim) = v;
  }
  EXPECT_LE((y - attention_.o * heads).cwiseAbs().maxCoeff(), 1e-5);
}

TEST_F(BlocksTest, ZeroQueryGivesUniformAverage) {
  AttentionParams p = attention_;
  p.q.setZero();
  auto state = make_attention_state(p.head_dim, 4);
  const Matrix x = random_matrix(config_.model_dim, 3, rng_);
  Vector y;
  for (int t = 0; t < 3; ++t) y = local_mqa_step(x.col(t), state, p);
  const Vector mean_v = (p.v * x).rowwise().mean();
  Vector heads(p.q.rows());
  for (int h = 0; h < p.num_heads; ++h) {
    heads.segment(h * p.head_dim, p.head_dim) = mean_v;
  }
  EXPECT_LE((y - p.o * heads).cwiseAbs().maxCoeff(), 1e-5);
}

TEST_F(BlocksTest, LocalAttentionMatchesBandOracle) {
  const int w = config_.attention_window;
  const Matrix x = random_matrix(config_.model_dim, 3 * w, rng_);
  const MatD oracle = attention_oracle(x, attention_, w);
  const Matrix parallel = attention_parallel(x, attention_, w);
  auto state = make_attention_state(config_.head_dim, w);
  for (Eigen::Index t = 0; t < x.cols(); ++t) {
    const Vector y = local_mqa_step(x.col(t), state, attention_);
    EXPECT_LE((y.cast<double>() - oracle.col(t)).cwiseAbs().maxCoeff(), 1e-4)
        << t;
    EXPECT_LE((parallel.col(t).cast<double>() - oracle.col(t))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-4)
        << t;
  }
}

TEST_F(BlocksTest, LocalAttentionStateBytesConstant) {
  auto state = make_attention_state(config_.head_dim, config_.attention_window);
  const std::size_t bytes = state.bytes();
  EXPECT_EQ(bytes, static_cast<std::size_t>(2 * config_.head_dim *
                                            config_.attention_window * 4));
  for (int t = 0; t < 5 * config_.attention_window; ++t) {
    local_mqa_step(random_matrix(config_.model_dim, 1, rng_).col(0), state,
                   attention_);
    ASSERT_EQ(state.bytes(), bytes);
    ASSERT_LE(state.fill, config_.attention_window);
  }
}

TEST_F(BlocksTest, FullAttentionMatchesOracleAndGrows) {
  const Matrix x = random_matrix(config_.model_dim, 40, rng_);
  const MatD oracle = attention_oracle(x, attention_, std::nullopt);
  auto cache = make_kv_cache(config_.head_dim);
  for (Eigen::Index t = 0; t < x.cols(); ++t) {
    const Vector y = full_attention_step(x.col(t), cache, attention_);
    EXPECT_LE((y.cast<double>() - oracle.col(t)).cwiseAbs().maxCoeff(), 1e-4);
    EXPECT_EQ(cache.bytes(),
              static_cast<std::size_t>(t + 1) * cache.row_bytes());
  }
}

TEST_F(BlocksTest, WindowCoveringSequenceEqualsFullAttention) {
  const Matrix x = random_matrix(config_.model_dim, 20, rng_);
  auto ring = make_attention_state(config_.head_dim, 32);
  auto cache = make_kv_cache(config_.head_dim);
  for (Eigen::Index t = 0; t < x.cols(); ++t) {
    const Vector local = local_mqa_step(x.col(t), ring, attention_);
    const Vector full = full_attention_step(x.col(t), cache, attention_);
    EXPECT_LE((local - full).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST_F(BlocksTest, ZeroMlpGivesZero) {
  MlpParams p = mlp_;
  p.down.setZero();
  p.down_bias.setZero();
  EXPECT_EQ(gated_mlp(random_matrix(config_.model_dim, 3, rng_), p),
            Matrix::Zero(config_.model_dim, 3));
}

TEST_F(BlocksTest, MlpMatchesOracle) {
  const Matrix x = random_matrix(config_.model_dim, 5, rng_);
  const MatD xd = x.cast<double>();
  MatD gate = mlp_.gate.cast<double>() * xd;
  gate.colwise() += mlp_.gate_bias.cast<double>();
  MatD up = mlp_.up.cast<double>() * xd;
  up.colwise() += mlp_.up_bias.cast<double>();
  MatD oracle =
      mlp_.down.cast<double>() * gate.unaryExpr(&gelu_d).cwiseProduct(up);
  oracle.colwise() += mlp_.down_bias.cast<double>();
  EXPECT_LE((gated_mlp(x, mlp_).cast<double>() - oracle).cwiseAbs().maxCoeff(),
            1e-4);
  EXPECT_EQ(gated_mlp(x, mlp_), gated_mlp(x, mlp_));
}

TEST(Ops, RmsNormUnitRms) {
  std::mt19937_64 rng(1);
  const Matrix x = random_matrix(64, 4, rng, 5.0);
  const Matrix y = rms_norm(x, Vector::Ones(64));
  for (Eigen::Index c = 0; c < 4; ++c) {
    EXPECT_NEAR(std::sqrt(y.col(c).squaredNorm() / 64.0), 1.0, 1e-4);
  }
}

TEST(Ops, ActivationsStable) {
  EXPECT_EQ(sigmoid(-200.0f), 0.0f);
  EXPECT_EQ(sigmoid(200.0f), 1.0f);
  EXPECT_EQ(softplus(100.0f), 100.0f);
  EXPECT_NEAR(gelu(1.0f), gelu_d(1.0), 1e-6);
}

}  // namespace
}  // namespace longgen::blocks
