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

#include "longgen/core/config.h"

#include <algorithm>
#include <cmath>

#include "longgen/core/errors.h"

namespace longgen {

std::string_view block_kind_name(BlockKind kind) {
  switch (kind) {
    case BlockKind::kRecurrent:
      return "recurrent";
    case BlockKind::kLocalAttention:
      return "local_attention";
    case BlockKind::kGlobalAttention:
      return "global_attention";
  }
  return "unknown";
}

BlockKind parse_block_kind(std::string_view name) {
  if (name == "recurrent") return BlockKind::kRecurrent;
  if (name == "local_attention") return BlockKind::kLocalAttention;
  if (name == "global_attention") return BlockKind::kGlobalAttention;
  throw InvalidArgument("unknown block kind '" + std::string(name) + "'");
}

int ModelConfig::mlp_hidden_dim() const {
  return static_cast<int>(std::lround(mlp_expansion * model_dim));
}

bool ModelConfig::has_constant_state() const {
  return std::none_of(pattern.begin(), pattern.end(), [](BlockKind k) {
    return k == BlockKind::kGlobalAttention;
  });
}

void ModelConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw InvalidArgument("invalid model config: " + what);
  };
  require(vocab_size >= 1, "vocab_size must be >= 1");
  require(model_dim >= 1, "model_dim must be >= 1");
  require(num_superblocks >= 1, "num_superblocks must be >= 1");
  require(!pattern.empty(), "pattern must not be empty");
  require(attention_window >= 1, "attention_window must be >= 1");
  require(num_query_heads >= 1, "num_query_heads must be >= 1");
  require(model_dim % num_query_heads == 0,
          "model_dim must be divisible by num_query_heads");
  require(head_dim >= 1, "head_dim must be >= 1");
  require(conv_width >= 1, "conv_width must be >= 1");
  require(recurrence_dim >= 0, "recurrence_dim must be >= 0");
  require(recurrence_gate_constant > 0.0 &&
              std::isfinite(recurrence_gate_constant),
          "recurrence_gate_constant must be positive");
  require(mlp_expansion > 0.0 && mlp_hidden_dim() >= 1,
          "mlp_expansion must give a hidden width >= 1");
}

ModelConfig desk_config() { return ModelConfig{}; }

ModelConfig transformer_config(const ModelConfig& hybrid) {
  ModelConfig config = hybrid;
  std::fill(config.pattern.begin(), config.pattern.end(),
            BlockKind::kGlobalAttention);
  return config;
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  nlohmann::json pattern = nlohmann::json::array();
  for (BlockKind k : c.pattern) pattern.push_back(block_kind_name(k));
  j = nlohmann::json{
      {"vocab_size", c.vocab_size},
      {"model_dim", c.model_dim},
      {"num_superblocks", c.num_superblocks},
      {"pattern", pattern},
      {"attention_window", c.attention_window},
      {"num_query_heads", c.num_query_heads},
      {"head_dim", c.head_dim},
      {"conv_width", c.conv_width},
      {"recurrence_dim", c.recurrence_dim},
      {"recurrence_gate_constant", c.recurrence_gate_constant},
      {"mlp_expansion", c.mlp_expansion},
      {"seed", c.seed},
  };
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  ModelConfig d;
  try {
    c.vocab_size = j.value("vocab_size", d.vocab_size);
    c.model_dim = j.value("model_dim", d.model_dim);
    c.num_superblocks = j.value("num_superblocks", d.num_superblocks);
    c.attention_window = j.value("attention_window", d.attention_window);
    c.num_query_heads = j.value("num_query_heads", d.num_query_heads);
    c.head_dim = j.value("head_dim", d.head_dim);
    c.conv_width = j.value("conv_width", d.conv_width);
    c.recurrence_dim = j.value("recurrence_dim", d.recurrence_dim);
    c.recurrence_gate_constant =
        j.value("recurrence_gate_constant", d.recurrence_gate_constant);
    c.mlp_expansion = j.value("mlp_expansion", d.mlp_expansion);
    c.seed = j.value("seed", d.seed);
    if (j.contains("pattern")) {
      c.pattern.clear();
      for (const auto& name : j.at("pattern")) {
        c.pattern.push_back(parse_block_kind(name.get<std::string>()));
      }
    } else {
      c.pattern = d.pattern;
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed model config: ") + e.what());
  }
}

}  // namespace longgen
