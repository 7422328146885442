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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "longgen/blocks/ops.h"

namespace longgen::blocks {

// Multi-query attention: num_heads query heads share one key/value head. No
// positional encoding is applied anywhere.
struct AttentionParams {
  Matrix q;  // (heads * head_dim) x d
  Matrix k;  // head_dim x d
  Matrix v;  // head_dim x d
  Matrix o;  // d x (heads * head_dim)
  int num_heads = 1;
  int head_dim = 1;

  int model_dim() const { return static_cast<int>(q.cols()); }

  static AttentionParams load(const ParameterSet& params,
                              const std::string& prefix, int num_heads,
                              int head_dim);
};

// Sliding-window cache: a ring of the last `window` key/value rows. Capacity
// is allocated once and never changes.
struct AttentionBlockState {
  Matrix keys;    // head_dim x window
  Matrix values;  // head_dim x window
  int fill = 0;
  int cursor = 0;  // slot the next row is written to

  int capacity() const { return static_cast<int>(keys.cols()); }
  std::size_t bytes() const {
    return static_cast<std::size_t>(keys.size() + values.size()) *
           sizeof(float);
  }
};

AttentionBlockState make_attention_state(int head_dim, int window);

// Unbounded cache for full causal attention; grows by one row per step.
struct KvCacheState {
  int head_dim = 0;
  std::vector<float> keys;
  std::vector<float> values;
  std::int64_t rows = 0;

  std::size_t row_bytes() const {
    return 2 * static_cast<std::size_t>(head_dim) * sizeof(float);
  }
  std::size_t bytes() const {
    return static_cast<std::size_t>(rows) * row_bytes();
  }
};

KvCacheState make_kv_cache(int head_dim);

// Attention of one query position over `past` keys/values plus the current
// key/value. Returns the (heads * head_dim) concatenated head outputs before
// the output projection.
Vector attend(const Vector& query,
              const Eigen::Ref<const Matrix>& past_keys,
              const Eigen::Ref<const Matrix>& past_values,
              const Vector& key, const Vector& value, int num_heads,
              int head_dim);

Vector local_mqa_step(const Vector& x, AttentionBlockState& state,
                      const AttentionParams& params);
Matrix local_mqa_step_batch(const Matrix& x,
                            std::span<AttentionBlockState* const> states,
                            const AttentionParams& params);

Vector full_attention_step(const Vector& x, KvCacheState& state,
                           const AttentionParams& params);
Matrix full_attention_step_batch(const Matrix& x,
                                 std::span<KvCacheState* const> states,
                                 const AttentionParams& params);

// Whole sequence (x is d x T). Position t attends to positions
// [t - window, t] when a window is given, else to [0, t].
Matrix attention_parallel(const Matrix& x, const AttentionParams& params,
                          std::optional<int> window);

}  // namespace longgen::blocks
