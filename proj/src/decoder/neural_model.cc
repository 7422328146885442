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

#include "longgen/decoder/neural_model.h"

#include <cmath>
#include <random>

#include "longgen/core/errors.h"

namespace longgen::decoder {
namespace {

std::string layer_prefix(const ModelConfig& config, int layer) {
  const int per = static_cast<int>(config.pattern.size());
  return "superblock." + std::to_string(layer / per) + "." +
         std::to_string(layer % per) + ".";
}

template <typename S>
std::vector<S*> lane_states(std::span<DecodeState* const> states,
                            std::size_t layer) {
  std::vector<S*> out;
  out.reserve(states.size());
  for (DecodeState* s : states) {
    auto* neural = static_cast<NeuralState*>(s);
    auto* typed = std::get_if<S>(&neural->layers[layer]);
    if (typed == nullptr) {
      throw InvalidArgument("decode state layout does not match the model");
    }
    out.push_back(typed);
  }
  return out;
}

}  // namespace

std::unique_ptr<DecodeState> NeuralState::clone() const {
  return std::make_unique<NeuralState>(*this);
}

std::size_t NeuralState::bytes() const {
  std::size_t total = 0;
  for (const auto& layer : layers) {
    total += std::visit([](const auto& s) { return s.bytes(); }, layer);
  }
  return total;
}

NeuralModel::NeuralModel(ModelConfig config, const ParameterSet& params)
    : config_(std::move(config)) {
  config_.validate();
  // Rejects missing or mis-shaped tensors before any are bound.
  for (const auto& spec : required_tensors(config_)) {
    if (params.at(spec.name).shape != spec.shape) {
      throw SchemaError("tensor '" + spec.name +
                        "' does not match the model config");
    }
  }
  embedding_ = blocks::matrix_from(params, "embedding").transpose();
  final_norm_ = blocks::vector_from(params, "final_norm.scale");
  for (int l = 0; l < config_.num_layers(); ++l) {
    const std::string base = layer_prefix(config_, l);
    const BlockKind kind = config_.layer_kind(l);
    const std::string temporal =
        base + std::string(block_kind_name(kind)) + ".";
    Layer layer{kind,
                blocks::vector_from(params, base + "temporal_norm.scale"),
                {},
                blocks::vector_from(params, base + "mlp_norm.scale"),
                blocks::MlpParams::load(params, base + "mlp.")};
    if (kind == BlockKind::kRecurrent) {
      layer.temporal = blocks::RecurrentBlockParams::load(
          params, temporal,
          static_cast<float>(config_.recurrence_gate_constant));
    } else {
      layer.temporal = blocks::AttentionParams::load(
          params, temporal, config_.num_query_heads, config_.head_dim);
    }
    layers_.push_back(std::move(layer));
  }
}

std::unique_ptr<DecodeState> NeuralModel::init_state() const {
  auto state = std::make_unique<NeuralState>();
  state->layers.reserve(layers_.size());
  for (const Layer& layer : layers_) {
    switch (layer.kind) {
      case BlockKind::kRecurrent:
        state->layers.emplace_back(blocks::make_recurrent_state(
            std::get<blocks::RecurrentBlockParams>(layer.temporal)));
        break;
      case BlockKind::kLocalAttention:
        state->layers.emplace_back(blocks::make_attention_state(
            config_.head_dim, config_.attention_window));
        break;
      case BlockKind::kGlobalAttention:
        state->layers.emplace_back(blocks::make_kv_cache(config_.head_dim));
        break;
    }
  }
  return state;
}

blocks::Matrix NeuralModel::embed(std::span<const TokenId> tokens) const {
  const float scale = std::sqrt(static_cast<float>(config_.model_dim));
  blocks::Matrix x(config_.model_dim, static_cast<Eigen::Index>(tokens.size()));
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] < 0 || tokens[i] >= config_.vocab_size) {
      throw InvalidArgument("token id " + std::to_string(tokens[i]) +
                            " outside vocabulary of size " +
                            std::to_string(config_.vocab_size));
    }
    x.col(static_cast<Eigen::Index>(i)) = embedding_.col(tokens[i]) * scale;
  }
  return x;
}

Eigen::MatrixXf NeuralModel::unembed(const blocks::Matrix& hidden) const {
  return embedding_.transpose() * blocks::rms_norm(hidden, final_norm_);
}

Eigen::MatrixXf NeuralModel::step_batch(
    std::span<const TokenId> tokens,
    std::span<DecodeState* const> states) const {
  if (tokens.size() != states.size()) {
    throw InvalidArgument("one decode state per token required");
  }
  for (DecodeState* s : states) {
    auto* neural = dynamic_cast<NeuralState*>(s);
    if (neural == nullptr || neural->layers.size() != layers_.size()) {
      throw InvalidArgument("decode state was not created by this model");
    }
  }
  blocks::Matrix x = embed(tokens);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    const blocks::Matrix normed = blocks::rms_norm(x, layer.temporal_norm);
    switch (layer.kind) {
      case BlockKind::kRecurrent: {
        auto lanes = lane_states<blocks::RecurrentBlockState>(states, l);
        x += blocks::recurrent_block_step_batch(
            normed, lanes,
            std::get<blocks::RecurrentBlockParams>(layer.temporal));
        break;
      }
      case BlockKind::kLocalAttention: {
        auto lanes = lane_states<blocks::AttentionBlockState>(states, l);
        x += blocks::local_mqa_step_batch(
            normed, lanes, std::get<blocks::AttentionParams>(layer.temporal));
        break;
      }
      case BlockKind::kGlobalAttention: {
        auto lanes = lane_states<blocks::KvCacheState>(states, l);
        x += blocks::full_attention_step_batch(
            normed, lanes, std::get<blocks::AttentionParams>(layer.temporal));
        break;
      }
    }
    x += blocks::gated_mlp(blocks::rms_norm(x, layer.mlp_norm), layer.mlp);
  }
  for (DecodeState* s : states) ++s->position;
  return unembed(x);
}

Eigen::MatrixXf NeuralModel::forward_parallel(const TokenStream& tokens) const {
  blocks::Matrix x = embed(tokens.ids);
  for (const Layer& layer : layers_) {
    const blocks::Matrix normed = blocks::rms_norm(x, layer.temporal_norm);
    switch (layer.kind) {
      case BlockKind::kRecurrent:
        x += blocks::recurrent_block_parallel(
            normed, std::get<blocks::RecurrentBlockParams>(layer.temporal));
        break;
      case BlockKind::kLocalAttention:
        x += blocks::attention_parallel(
            normed, std::get<blocks::AttentionParams>(layer.temporal),
            config_.attention_window);
        break;
      case BlockKind::kGlobalAttention:
        x += blocks::attention_parallel(
            normed, std::get<blocks::AttentionParams>(layer.temporal),
            std::nullopt);
        break;
    }
    x += blocks::gated_mlp(blocks::rms_norm(x, layer.mlp_norm), layer.mlp);
  }
  return unembed(x);
}

std::size_t NeuralModel::state_bytes_at(std::int64_t position) const {
  const std::size_t f = sizeof(float);
  const std::size_t r = static_cast<std::size_t>(
      config_.effective_recurrence_dim());
  const std::size_t hd = static_cast<std::size_t>(config_.head_dim);
  std::size_t total = 0;
  for (const Layer& layer : layers_) {
    switch (layer.kind) {
      case BlockKind::kRecurrent:
        total += r * static_cast<std::size_t>(config_.conv_width) * f;
        break;
      case BlockKind::kLocalAttention:
        total += 2 * hd * static_cast<std::size_t>(config_.attention_window) *
                 f;
        break;
      case BlockKind::kGlobalAttention:
        total += 2 * hd * static_cast<std::size_t>(position) * f;
        break;
    }
  }
  return total;
}

std::unique_ptr<DecodeState> NeuralModel::synthetic_state(
    std::int64_t position, std::uint64_t seed) const {
  if (position < 0) throw InvalidArgument("position must be non-negative");
  auto state = std::unique_ptr<NeuralState>(
      static_cast<NeuralState*>(init_state().release()));
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> normal(0.0f, 1.0f);
  auto fill = [&](float* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) data[i] = normal(rng);
  };
  for (auto& layer : state->layers) {
    if (auto* rec = std::get_if<blocks::RecurrentBlockState>(&layer)) {
      fill(rec->h.data(), static_cast<std::size_t>(rec->h.size()));
      if (position > 0) {
        fill(rec->conv_tail.data(),
             static_cast<std::size_t>(rec->conv_tail.size()));
      }
    } else if (auto* ring = std::get_if<blocks::AttentionBlockState>(&layer)) {
      ring->fill = static_cast<int>(
          std::min<std::int64_t>(position, ring->capacity()));
      ring->cursor = static_cast<int>(position % ring->capacity());
      fill(ring->keys.data(), static_cast<std::size_t>(ring->keys.size()));
      fill(ring->values.data(),
           static_cast<std::size_t>(ring->values.size()));
    } else {
      auto& kv = std::get<blocks::KvCacheState>(layer);
      const std::size_t n =
          static_cast<std::size_t>(position) * static_cast<std::size_t>(kv.head_dim);
      kv.keys.resize(n);
      kv.values.resize(n);
      fill(kv.keys.data(), n);
      fill(kv.values.data(), n);
      kv.rows = position;
    }
  }
  state->position = position;
  return state;
}

NeuralModel make_hybrid_model(const ModelConfig& config, std::uint64_t seed) {
  return NeuralModel(config, init_random_weights(config, seed));
}

NeuralModel make_transformer_baseline(const ModelConfig& hybrid,
                                      std::uint64_t seed) {
  const ModelConfig config = transformer_config(hybrid);
  return NeuralModel(config, init_random_weights(config, seed));
}

}  // namespace longgen::decoder
