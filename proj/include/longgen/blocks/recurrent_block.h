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

#include <span>
#include <string>

#include "longgen/blocks/ops.h"

namespace longgen::blocks {

// Gated linear recurrent block:
//   out = W_out [ gelu(W_a x) * rglru(conv(W_b x)) ]
// with the gated recurrence
//   r = sigmoid(G_a c + g_a), i = sigmoid(G_x c + g_x)
//   a = exp(-k * softplus(decay) * r)
//   h = a * h + sqrt(1 - a^2) * (i * c)
struct RecurrentBlockParams {
  Matrix branch_a;     // R x d
  Matrix branch_b;     // R x d
  Matrix conv_weight;  // R x width; column k multiplies the input k steps back
  Vector conv_bias;    // R
  Matrix gate_a;       // R x R
  Vector gate_a_bias;
  Matrix gate_x;       // R x R
  Vector gate_x_bias;
  Vector decay;        // R, unconstrained
  Matrix out;          // d x R
  float gate_constant = 8.0f;

  int model_dim() const { return static_cast<int>(branch_a.cols()); }
  int recurrence_dim() const { return static_cast<int>(branch_a.rows()); }
  int conv_width() const { return static_cast<int>(conv_weight.cols()); }

  // `prefix` is e.g. "superblock.0.1.recurrent.".
  static RecurrentBlockParams load(const ParameterSet& params,
                                   const std::string& prefix,
                                   float gate_constant);
  static RecurrentBlockParams zeros(int model_dim, int recurrence_dim,
                                    int conv_width, float gate_constant);
};

struct RecurrentBlockState {
  Vector h;          // R
  Matrix conv_tail;  // R x (width - 1); column j is the input j + 1 steps back

  std::size_t bytes() const {
    return static_cast<std::size_t>(h.size() + conv_tail.size()) *
           sizeof(float);
  }
};

RecurrentBlockState make_recurrent_state(const RecurrentBlockParams& params);

// Per-step gated decay a and recurrence input b for conv outputs c (R x N).
struct GatedInputs {
  Matrix a;
  Matrix b;
};
GatedInputs gate_recurrence_inputs(const Matrix& conv_out,
                                   const RecurrentBlockParams& params);

Vector recurrent_block_step(const Vector& x, RecurrentBlockState& state,
                            const RecurrentBlockParams& params);

// One step for each lane: column l of x advances *states[l].
Matrix recurrent_block_step_batch(const Matrix& x,
                                  std::span<RecurrentBlockState* const> states,
                                  const RecurrentBlockParams& params);

// Whole sequence at once (x is d x T), starting from a fresh state. The
// recurrence runs through rglru_scan.
Matrix recurrent_block_parallel(const Matrix& x,
                                const RecurrentBlockParams& params);

}  // namespace longgen::blocks
