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

#include <vector>

#include <json.hpp>

#include "longgen/decoder/sequence_model.h"

namespace longgen::decoder {

// First-order Markov model over an explicit transition table. Logits are
// log-probabilities (-inf where a transition has zero mass), which makes
// every downstream pipeline checkable by hand.
class ScriptedModel final : public SequenceModel {
 public:
  // transitions[v][w] = P(next = w | current = v); start[w] = P(first = w).
  // Rows are normalized on construction.
  ScriptedModel(std::vector<std::vector<double>> transitions,
                std::vector<double> start);

  // next[v] is the only successor of v; `start` is the only first token.
  static ScriptedModel deterministic(const std::vector<TokenId>& next,
                                     TokenId start);
  static ScriptedModel uniform(int vocab_size);
  // Each row spreads its mass over `branching` seeded successors.
  static ScriptedModel random_sparse(int vocab_size, int branching,
                                     std::uint64_t seed);

  // {"type": "scripted", "next": [...], "start": s} or
  // {"type": "scripted", "transitions": [[...]], "start_probs": [...]}
  // or {"type": "scripted", "vocab_size": V, "branching": k, "seed": s}.
  static ScriptedModel from_json(const nlohmann::json& spec);

  int vocab_size() const override {
    return static_cast<int>(transitions_.size());
  }
  std::unique_ptr<DecodeState> init_state() const override;
  Eigen::MatrixXf step_batch(
      std::span<const TokenId> tokens,
      std::span<DecodeState* const> states) const override;
  Logits prior_logits() const override { return start_logits_; }
  bool constant_state() const override { return true; }
  std::size_t state_bytes_at(std::int64_t) const override;
  std::unique_ptr<DecodeState> synthetic_state(
      std::int64_t position, std::uint64_t seed) const override;

  double transition(TokenId from, TokenId to) const {
    return transitions_[static_cast<std::size_t>(from)]
                       [static_cast<std::size_t>(to)];
  }
  // Most likely successor (lowest id on ties).
  TokenId greedy_next(TokenId from) const;

 private:
  std::vector<std::vector<double>> transitions_;
  std::vector<Logits> logits_;
  Logits start_logits_;
};

}  // namespace longgen::decoder
