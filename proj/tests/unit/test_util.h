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

#include <random>
#include <vector>

#include "longgen/core/config.h"
#include "longgen/core/types.h"

namespace longgen::testing {

// Small hybrid config for fast unit tests.
inline ModelConfig tiny_config() {
  ModelConfig c;
  c.vocab_size = 64;
  c.model_dim = 32;
  c.num_superblocks = 2;
  c.attention_window = 8;
  c.num_query_heads = 2;
  c.head_dim = 16;
  c.mlp_expansion = 2.0;
  return c;
}

inline TokenStream random_stream(int length, int vocab, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<TokenId> id(0, vocab - 1);
  TokenStream s;
  for (int i = 0; i < length; ++i) s.ids.push_back(id(rng));
  return s;
}

}  // namespace longgen::testing
