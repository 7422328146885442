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
#include <random>
#include <utility>
#include <vector>

#include "longgen/core/types.h"
#include "longgen/decoder/sequence_model.h"

namespace longgen::decoder {

struct SamplingOptions {
  double temperature = 1.0;
  // Argmax decoding; temperature is ignored. Greedy is never expressed as a
  // zero temperature.
  bool greedy = false;
  // Keep only the k most likely tokens before sampling; 0 disables.
  int top_k = 0;

  void validate() const;
};

// Uniform double in [0, 1) from the top 53 bits of one engine draw.
double uniform_unit(std::mt19937_64& rng);

// softmax(logits / temperature) in double precision.
std::vector<double> softmax_probabilities(const Logits& logits,
                                          double temperature);

TokenId sample_token(const Logits& logits, const SamplingOptions& options,
                     std::mt19937_64& rng);

// One decoding session over a shared model. Position advances by exactly one
// per consumed or emitted token.
class DecoderSession {
 public:
  DecoderSession(const SequenceModel& model, SamplingOptions options,
                 std::uint64_t seed);

  void feed(TokenId token);
  void feed(const std::vector<TokenId>& tokens);
  // Samples the next token from the current prediction and consumes it.
  TokenId emit();

  std::int64_t position() const { return state_->position; }
  const DecodeState& state() const { return *state_; }
  std::size_t state_bytes() const { return state_->bytes(); }

 private:
  const SequenceModel* model_;
  SamplingOptions options_;
  std::mt19937_64 rng_;
  std::unique_ptr<DecodeState> state_;
  std::optional<Logits> next_logits_;
};

// Consumes `prompt` through the step path and samples exactly `length` new
// tokens. An empty prompt samples the first token from the model prior.
TokenStream sample_continuation(const SequenceModel& model,
                                const TokenStream& prompt,
                                std::int64_t length,
                                const SamplingOptions& options,
                                std::uint64_t seed);

}  // namespace longgen::decoder
