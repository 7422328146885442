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

#pragma once

#include <variant>
#include <vector>

#include "longgen/blocks/attention.h"
#include "longgen/blocks/mlp.h"
#include "longgen/blocks/recurrent_block.h"
#include "longgen/core/config.h"
#include "longgen/core/weights.h"
#include "longgen/decoder/sequence_model.h"

namespace longgen::decoder {

using LayerState = std::variant<blocks::RecurrentBlockState,
                                blocks::AttentionBlockState,
                                blocks::KvCacheState>;

class NeuralState final : public DecodeState {
 public:
  std::unique_ptr<DecodeState> clone() const override;
  std::size_t bytes() const override;

  std::vector<LayerState> layers;
};

// Stack of pre-normalized residual layers, each a temporal block followed by
// a gated MLP, with tied input/output embeddings. The config pattern decides
// the temporal blocks: the hybrid repeats (recurrent, recurrent, local
// attention); the Transformer baseline uses global attention everywhere.
class NeuralModel final : public SequenceModel {
 public:
  NeuralModel(ModelConfig config, const ParameterSet& params);

  const ModelConfig& config() const { return config_; }

  int vocab_size() const override { return config_.vocab_size; }
  std::unique_ptr<DecodeState> init_state() const override;
  Eigen::MatrixXf step_batch(
      std::span<const TokenId> tokens,
      std::span<DecodeState* const> states) const override;
  bool constant_state() const override {
    return config_.has_constant_state();
  }
  std::size_t state_bytes_at(std::int64_t position) const override;
  std::unique_ptr<DecodeState> synthetic_state(
      std::int64_t position, std::uint64_t seed) const override;

  // Causal logits for every position at once (vocab_size x T). Column t
  // predicts token t + 1 and matches stepping the same prefix.
  Eigen::MatrixXf forward_parallel(const TokenStream& tokens) const;

 private:
  struct Layer {
    BlockKind kind;
    blocks::Vector temporal_norm;
    std::variant<blocks::RecurrentBlockParams, blocks::AttentionParams>
        temporal;
    blocks::Vector mlp_norm;
    blocks::MlpParams mlp;
  };

  blocks::Matrix embed(std::span<const TokenId> tokens) const;
  Eigen::MatrixXf unembed(const blocks::Matrix& hidden) const;

  ModelConfig config_;
  blocks::Matrix embedding_;  // model_dim x vocab_size
  blocks::Vector final_norm_;
  std::vector<Layer> layers_;
};

// Convenience constructors over init_random_weights.
NeuralModel make_hybrid_model(const ModelConfig& config, std::uint64_t seed);
// Full-attention baseline with the same widths and depth as `hybrid`.
NeuralModel make_transformer_baseline(const ModelConfig& hybrid,
                                      std::uint64_t seed);

}  // namespace longgen::decoder
