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

#include "longgen/core/errors.h"
#include "longgen/decoder/neural_model.h"
#include "longgen/decoder/sampling.h"
#include "longgen/decoder/scoring.h"
#include "longgen/decoder/scripted_model.h"
#include "test_util.h"

namespace longgen::decoder {
namespace {

class NeuralModelTest : public ::testing::Test {
 protected:
  ModelConfig config_ = testing::tiny_config();
  NeuralModel hybrid_ = make_hybrid_model(config_, 3);
};

TEST_F(NeuralModelTest, ParallelMatchesStepping) {
  const TokenStream s = testing::random_stream(40, config_.vocab_size, 1);
  const Eigen::MatrixXf parallel = hybrid_.forward_parallel(s);
  auto state = hybrid_.init_state();
  for (std::size_t t = 0; t < s.size(); ++t) {
    const Logits logits = hybrid_.step(s.ids[t], *state);
    EXPECT_LE((logits - parallel.col(static_cast<Eigen::Index>(t)))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-3)
        << t;
  }
  EXPECT_EQ(state->position, 40);
}

TEST_F(NeuralModelTest, FutureTokensDoNotAffectPast) {
  TokenStream a = testing::random_stream(30, config_.vocab_size, 2);
  TokenStream b = a;
  for (std::size_t t = 20; t < 30; ++t) {
    b.ids[t] = (b.ids[t] + 1) % config_.vocab_size;
  }
  const Eigen::MatrixXf la = hybrid_.forward_parallel(a);
  const Eigen::MatrixXf lb = hybrid_.forward_parallel(b);
  EXPECT_EQ(la.leftCols(20), lb.leftCols(20));
}

TEST_F(NeuralModelTest, StepIsDeterministic) {
  const TokenStream s = testing::random_stream(10, config_.vocab_size, 4);
  auto s1 = hybrid_.init_state();
  auto s2 = hybrid_.init_state();
  for (TokenId t : s.ids) {
    EXPECT_EQ(hybrid_.step(t, *s1), hybrid_.step(t, *s2));
  }
}

TEST_F(NeuralModelTest, BatchMatchesSingleLane) {
  const TokenStream a = testing::random_stream(12, config_.vocab_size, 5);
  const TokenStream b = testing::random_stream(12, config_.vocab_size, 6);
  auto la = hybrid_.init_state();
  auto lb = hybrid_.init_state();
  auto solo = hybrid_.init_state();
  for (std::size_t t = 0; t < a.size(); ++t) {
    const TokenId tokens[] = {a.ids[t], b.ids[t]};
    DecodeState* states[] = {la.get(), lb.get()};
    const Eigen::MatrixXf batch = hybrid_.step_batch(tokens, states);
    EXPECT_LE((batch.col(1) - hybrid_.step(b.ids[t], *solo))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-4);
  }
}

TEST_F(NeuralModelTest, HybridStateIsConstant) {
  auto state = hybrid_.init_state();
  const std::size_t bytes = state->bytes();
  EXPECT_EQ(bytes, hybrid_.state_bytes_at(0));
  for (TokenId t : testing::random_stream(50, config_.vocab_size, 7).ids) {
    hybrid_.step(t, *state);
    ASSERT_EQ(state->bytes(), bytes);
  }
  EXPECT_TRUE(hybrid_.constant_state());
}

TEST_F(NeuralModelTest, TransformerCacheGrowsLinearly) {
  const NeuralModel transformer = make_transformer_baseline(config_, 3);
  EXPECT_FALSE(transformer.constant_state());
  const std::size_t row =
      static_cast<std::size_t>(config_.num_layers()) * 2 *
      static_cast<std::size_t>(config_.head_dim) * sizeof(float);
  auto state = transformer.init_state();
  EXPECT_EQ(state->bytes(), 0u);
  const TokenStream s = testing::random_stream(25, config_.vocab_size, 8);
  for (std::size_t t = 0; t < s.size(); ++t) {
    transformer.step(s.ids[t], *state);
    EXPECT_EQ(state->bytes(), (t + 1) * row);
    EXPECT_EQ(transformer.state_bytes_at(static_cast<std::int64_t>(t + 1)),
              (t + 1) * row);
  }
}

TEST_F(NeuralModelTest, SyntheticStateHasAnalyticSize) {
  const NeuralModel transformer = make_transformer_baseline(config_, 3);
  for (std::int64_t pos : {0, 1, 100, 5000}) {
    EXPECT_EQ(transformer.synthetic_state(pos, 1)->bytes(),
              transformer.state_bytes_at(pos));
    EXPECT_EQ(hybrid_.synthetic_state(pos, 1)->bytes(),
              hybrid_.state_bytes_at(pos));
  }
  auto state = transformer.synthetic_state(100, 2);
  EXPECT_EQ(state->position, 100);
  EXPECT_TRUE(transformer.step(0, *state).allFinite());
}

TEST_F(NeuralModelTest, RejectsOutOfVocabulary) {
  auto state = hybrid_.init_state();
  EXPECT_THROW(hybrid_.step(config_.vocab_size, *state), InvalidArgument);
}

TEST_F(NeuralModelTest, RejectsMismatchedWeights) {
  ModelConfig other = config_;
  other.model_dim = 16;
  other.head_dim = 8;
  EXPECT_THROW(NeuralModel(config_, init_random_weights(other, 1)),
               SchemaError);
}

TEST(Scoring, UniformModelScoresMinusNLogV) {
  const ScriptedModel model = ScriptedModel::uniform(10);
  const TokenStream s = testing::random_stream(17, 10, 9);
  EXPECT_NEAR(score_loglikelihood(model, s), -17.0 * std::log(10.0), 1e-9);
}

TEST(Scoring, GreedyOutputOfDeterministicModelScoresZero) {
  const ScriptedModel model = ScriptedModel::deterministic({1, 2, 3, 0}, 2);
  SamplingOptions greedy;
  greedy.greedy = true;
  const TokenStream out = sample_continuation(model, {}, 12, greedy, 0);
  EXPECT_EQ(out.ids, (std::vector<TokenId>{2, 3, 0, 1, 2, 3, 0, 1, 2, 3, 0,
                                           1}));
  EXPECT_EQ(score_loglikelihood(model, out), 0.0);
}

TEST(Scoring, EmptyStreamRejected) {
  EXPECT_THROW(score_loglikelihood(ScriptedModel::uniform(4), TokenStream{}),
               InvalidArgument);
}

TEST(Scoring, LogProbabilityMatchesOracle) {
  Logits logits(3);
  logits << 1.0f, 2.0f, 3.0f;
  const double z = std::exp(1.0) + std::exp(2.0) + std::exp(3.0);
  EXPECT_NEAR(log_probability(logits, 1), 2.0 - std::log(z), 1e-7);
}

TEST(Scoring, ContrastiveAccuracyCountsTiesAsHalf) {
  const ScriptedModel model = ScriptedModel::deterministic({1, 2, 0}, 0);
  const TokenStream good{{0, 1, 2}, 25.0};
  const TokenStream bad{{0, 2, 1}, 25.0};
  std::vector<ContrastivePair> pairs = {{good, bad}, {bad, good}, {good, good}};
  EXPECT_DOUBLE_EQ(contrastive_accuracy(model, pairs), 0.5);
  pairs = {{good, bad}, {good, bad}};
  EXPECT_DOUBLE_EQ(contrastive_accuracy(model, pairs), 1.0);
  EXPECT_THROW(contrastive_accuracy(model, {}), InvalidArgument);
}

TEST(Sampling, ZeroTemperatureRejected) {
  SamplingOptions o;
  o.temperature = 0.0;
  EXPECT_THROW(o.validate(), InvalidArgument);
  o.greedy = true;
  EXPECT_NO_THROW(o.validate());
}

TEST(Sampling, UniformUnitInRange) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = uniform_unit(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Sampling, FrequenciesMatchSoftmax) {
  Logits logits(4);
  logits << 0.0f, 1.0f, -1.0f, 0.5f;
  const double temperature = 0.8;
  std::vector<double> expected(4);
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    expected[i] = std::exp(static_cast<double>(logits(i)) / temperature);
    total += expected[i];
  }
  SamplingOptions o;
  o.temperature = temperature;
  std::mt19937_64 rng(2);
  const int draws = 100000;
  std::vector<int> counts(4);
  for (int i = 0; i < draws; ++i) ++counts[sample_token(logits, o, rng)];
  for (int i = 0; i < 4; ++i) {
    const double p = expected[i] / total;
    const double se = std::sqrt(p * (1 - p) / draws);
    EXPECT_NEAR(counts[i] / static_cast<double>(draws), p, 3 * se) << i;
  }
}

TEST(Sampling, TopKRestrictsSupport) {
  Logits logits(5);
  logits << 0.0f, 3.0f, 1.0f, 2.0f, -1.0f;
  SamplingOptions o;
  o.top_k = 2;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    const TokenId t = sample_token(logits, o, rng);
    ASSERT_TRUE(t == 1 || t == 3) << t;
  }
}

TEST(Sampling, ContinuationIsSeededAndSized) {
  const ScriptedModel model = ScriptedModel::random_sparse(20, 3, 4);
  const TokenStream prompt{{1, 2, 3}, 25.0};
  const TokenStream a = sample_continuation(model, prompt, 100, {}, 7);
  const TokenStream b = sample_continuation(model, prompt, 100, {}, 7);
  const TokenStream c = sample_continuation(model, prompt, 100, {}, 8);
  EXPECT_EQ(a.ids.size(), 100u);
  EXPECT_EQ(a.ids, b.ids);
  EXPECT_NE(a.ids, c.ids);
  EXPECT_TRUE(sample_continuation(model, prompt, 0, {}, 7).empty());
  // Every sampled transition has positive mass.
  TokenId prev = prompt.ids.back();
  for (TokenId t : a.ids) {
    EXPECT_GT(model.transition(prev, t), 0.0);
    prev = t;
  }
}

TEST(Sampling, SessionPositionCountsTokens) {
  const ScriptedModel model = ScriptedModel::uniform(5);
  DecoderSession session(model, {}, 1);
  session.feed(std::vector<TokenId>{0, 1, 2});
  EXPECT_EQ(session.position(), 3);
  session.emit();
  EXPECT_EQ(session.position(), 4);
}

TEST(ScriptedModel, FromJsonVariants) {
  const auto det = ScriptedModel::from_json(
      nlohmann::json{{"type", "scripted"}, {"next", {1, 0}}, {"start", 1}});
  EXPECT_EQ(det.greedy_next(0), 1);
  const auto table = ScriptedModel::from_json(nlohmann::json{
      {"transitions", {{1.0, 3.0}, {2.0, 2.0}}}});
  EXPECT_DOUBLE_EQ(table.transition(0, 1), 0.75);
  EXPECT_THROW(ScriptedModel::from_json(nlohmann::json{{"bogus", 1}}),
               InvalidArgument);
  EXPECT_THROW(ScriptedModel::from_json(
                   nlohmann::json{{"transitions", {{1.0, -1.0}, {1.0, 1.0}}}}),
               InvalidArgument);
}

}  // namespace
}  // namespace longgen::decoder
