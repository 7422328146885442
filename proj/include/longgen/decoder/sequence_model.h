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
#include <memory>
#include <optional>
#include <span>

#include <Eigen/Dense>

#include "longgen/core/types.h"

namespace longgen::decoder {

using Logits = Eigen::VectorXf;

// Per-session decoding state. `position` counts consumed tokens.
class DecodeState {
 public:
  virtual ~DecodeState() = default;
  virtual std::unique_ptr<DecodeState> clone() const = 0;
  // Bytes of state the session holds; constant for constant-state models.
  virtual std::size_t bytes() const = 0;

  std::int64_t position = 0;
};

// Autoregressive next-token model with an explicit, caller-owned state.
// Implementations are immutable after construction and may be shared across
// threads; each DecodeState belongs to one session at a time.
class SequenceModel {
 public:
  virtual ~SequenceModel() = default;

  virtual int vocab_size() const = 0;
  virtual std::unique_ptr<DecodeState> init_state() const = 0;

  // Consumes tokens[l] into *states[l] for every lane and returns the
  // next-token logits as a vocab_size x lanes matrix.
  virtual Eigen::MatrixXf step_batch(
      std::span<const TokenId> tokens,
      std::span<DecodeState* const> states) const = 0;

  Logits step(TokenId token, DecodeState& state) const;

  // Distribution of the first token when nothing has been consumed.
  // Uniform unless a model overrides it.
  virtual Logits prior_logits() const;

  // True if step never grows the state.
  virtual bool constant_state() const = 0;
  virtual std::optional<std::int64_t> max_train_len() const {
    return std::nullopt;
  }

  // State bytes after `position` tokens, from the layout alone.
  virtual std::size_t state_bytes_at(std::int64_t position) const = 0;

  // A state with the shape it would have after `position` tokens, filled
  // with seeded random contents. Step cost depends only on shapes, so the
  // benchmark uses this to reach deep positions without a quadratic prefill.
  virtual std::unique_ptr<DecodeState> synthetic_state(
      std::int64_t position, std::uint64_t seed) const = 0;
};

}  // namespace longgen::decoder
