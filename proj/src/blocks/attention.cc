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

#include "longgen/blocks/attention.h"

#include <cmath>

#include "longgen/core/errors.h"

namespace longgen::blocks {
namespace {

void check_input(const Matrix& x, const AttentionParams& params) {
  if (x.rows() != params.model_dim()) {
    throw InvalidArgument("attention block expects inputs of width " +
                          std::to_string(params.model_dim()) + ", got " +
                          std::to_string(x.rows()));
  }
}

}  // namespace

AttentionParams AttentionParams::load(const ParameterSet& params,
                                      const std::string& prefix,
                                      int num_heads, int head_dim) {
  AttentionParams p;
  p.q = matrix_from(params, prefix + "q");
  p.k = matrix_from(params, prefix + "k");
  p.v = matrix_from(params, prefix + "v");
  p.o = matrix_from(params, prefix + "o");
  p.num_heads = num_heads;
  p.head_dim = head_dim;
  return p;
}

AttentionBlockState make_attention_state(int head_dim, int window) {
  AttentionBlockState state;
  state.keys = Matrix::Zero(head_dim, window);
  state.values = Matrix::Zero(head_dim, window);
  return state;
}

KvCacheState make_kv_cache(int head_dim) {
  KvCacheState state;
  state.head_dim = head_dim;
  return state;
}

Vector attend(const Vector& query, const Eigen::Ref<const Matrix>& past_keys,
              const Eigen::Ref<const Matrix>& past_values, const Vector& key,
              const Vector& value, int num_heads, int head_dim) {
  const float scale = 1.0f / std::sqrt(static_cast<float>(head_dim));
  const Eigen::Map<const Matrix> q(query.data(), head_dim, num_heads);
  const Eigen::Index past = past_keys.cols();

  // Row `past` holds the current position.
  Matrix scores(past + 1, num_heads);
  if (past > 0) scores.topRows(past).noalias() = past_keys.transpose() * q;
  scores.row(past).noalias() = key.transpose() * q;
  scores *= scale;

  for (int h = 0; h < num_heads; ++h) {
    const float max_score = scores.col(h).maxCoeff();
    scores.col(h) = (scores.col(h).array() - max_score).exp().matrix();
    scores.col(h) /= scores.col(h).sum();
  }

  Matrix out = value * scores.row(past);
  if (past > 0) out.noalias() += past_values * scores.topRows(past);
  return Eigen::Map<const Vector>(out.data(), out.size());
}

Matrix local_mqa_step_batch(const Matrix& x,
                            std::span<AttentionBlockState* const> states,
                            const AttentionParams& params) {
  check_input(x, params);
  if (static_cast<Eigen::Index>(states.size()) != x.cols()) {
    throw InvalidArgument("one attention state per batch lane required");
  }
  const Matrix q = params.q * x;
  const Matrix k = params.k * x;
  const Matrix v = params.v * x;
  Matrix heads(q.rows(), x.cols());
  for (Eigen::Index l = 0; l < x.cols(); ++l) {
    AttentionBlockState& s = *states[static_cast<std::size_t>(l)];
    if (s.keys.rows() != params.head_dim || s.capacity() < 1) {
      throw InvalidArgument("attention state does not match parameters");
    }
    heads.col(l) = attend(q.col(l), s.keys.leftCols(s.fill),
                          s.values.leftCols(s.fill), k.col(l), v.col(l),
                          params.num_heads, params.head_dim);
    s.keys.col(s.cursor) = k.col(l);
    s.values.col(s.cursor) = v.col(l);
    s.cursor = (s.cursor + 1) % s.capacity();
    if (s.fill < s.capacity()) ++s.fill;
  }
  return params.o * heads;
}

Vector local_mqa_step(const Vector& x, AttentionBlockState& state,
                      const AttentionParams& params) {
  AttentionBlockState* lanes[] = {&state};
  return local_mqa_step_batch(x, lanes, params).col(0);
}

Matrix full_attention_step_batch(const Matrix& x,
                                 std::span<KvCacheState* const> states,
                                 const AttentionParams& params) {
  check_input(x, params);
  if (static_cast<Eigen::Index>(states.size()) != x.cols()) {
    throw InvalidArgument("one KV cache per batch lane required");
  }
  const Matrix q = params.q * x;
  const Matrix k = params.k * x;
  const Matrix v = params.v * x;
  Matrix heads(q.rows(), x.cols());
  for (Eigen::Index l = 0; l < x.cols(); ++l) {
    KvCacheState& s = *states[static_cast<std::size_t>(l)];
    if (s.head_dim != params.head_dim) {
      throw InvalidArgument("KV cache does not match parameters");
    }
    const Eigen::Map<const Matrix> past_k(s.keys.data(), s.head_dim, s.rows);
    const Eigen::Map<const Matrix> past_v(s.values.data(), s.head_dim, s.rows);
    heads.col(l) = attend(q.col(l), past_k, past_v, k.col(l), v.col(l),
                          params.num_heads, params.head_dim);
    s.keys.insert(s.keys.end(), k.col(l).data(),
                  k.col(l).data() + s.head_dim);
    s.values.insert(s.values.end(), v.col(l).data(),
                    v.col(l).data() + s.head_dim);
    ++s.rows;
  }
  return params.o * heads;
}

Vector full_attention_step(const Vector& x, KvCacheState& state,
                           const AttentionParams& params) {
  KvCacheState* lanes[] = {&state};
  return full_attention_step_batch(x, lanes, params).col(0);
}

Matrix attention_parallel(const Matrix& x, const AttentionParams& params,
                          std::optional<int> window) {
  check_input(x, params);
  const Matrix q = params.q * x;
  const Matrix k = params.k * x;
  const Matrix v = params.v * x;
  Matrix heads(q.rows(), x.cols());
  for (Eigen::Index t = 0; t < x.cols(); ++t) {
    const Eigen::Index start =
        window ? std::max<Eigen::Index>(0, t - *window) : 0;
    heads.col(t) = attend(q.col(t), k.middleCols(start, t - start),
                          v.middleCols(start, t - start), k.col(t), v.col(t),
                          params.num_heads, params.head_dim);
  }
  return params.o * heads;
}

}  // namespace longgen::blocks
