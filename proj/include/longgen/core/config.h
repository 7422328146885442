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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "longgen/core/types.h"

namespace longgen {

enum class BlockKind {
  kRecurrent,
  kLocalAttention,
  // Causal attention over every previous position; used by the Transformer
  // baseline. Its cache grows by one row per step.
  kGlobalAttention,
};

std::string_view block_kind_name(BlockKind kind);
BlockKind parse_block_kind(std::string_view name);

struct ModelConfig {
  int vocab_size = kDefaultVocabSize;
  int model_dim = 256;
  int num_superblocks = 4;
  std::vector<BlockKind> pattern = {BlockKind::kRecurrent,
                                    BlockKind::kRecurrent,
                                    BlockKind::kLocalAttention};
  int attention_window = 128;
  int num_query_heads = 4;
  int head_dim = 64;
  int conv_width = 4;
  // Width of the recurrence state; 0 means model_dim.
  int recurrence_dim = 0;
  double recurrence_gate_constant = 8.0;
  double mlp_expansion = 3.0;
  std::uint64_t seed = 0;

  int num_layers() const {
    return num_superblocks * static_cast<int>(pattern.size());
  }
  BlockKind layer_kind(int layer) const {
    return pattern[static_cast<std::size_t>(layer) % pattern.size()];
  }
  int effective_recurrence_dim() const {
    return recurrence_dim > 0 ? recurrence_dim : model_dim;
  }
  int mlp_hidden_dim() const;
  // True if no layer keeps a growing cache.
  bool has_constant_state() const;

  // Throws InvalidArgument on any violated invariant.
  void validate() const;
};

// Desk-scale hybrid defaults: 4 superblocks of (recurrent, recurrent, local
// attention), model_dim 256, window 128.
ModelConfig desk_config();

// Same widths and depth as `hybrid`, with every temporal block replaced by
// full causal attention.
ModelConfig transformer_config(const ModelConfig& hybrid);

void to_json(nlohmann::json& j, const ModelConfig& config);
void from_json(const nlohmann::json& j, ModelConfig& config);

}  // namespace longgen
