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
#include <string_view>
#include <vector>

#include <json.hpp>

#include "longgen/core/types.h"
#include "longgen/decoder/sampling.h"
#include "longgen/decoder/sequence_model.h"

namespace longgen::longform {

enum class GenerationMode { kSingleSession, kSlideAndPrompt };

std::string_view generation_mode_name(GenerationMode mode);
GenerationMode parse_generation_mode(std::string_view name);

struct GenerationSpec {
  TokenStream prompt;
  double target_duration_s = 240.0;
  decoder::SamplingOptions sampling;
  std::uint64_t seed = 0;
  GenerationMode mode = GenerationMode::kSingleSession;
  // Slide-and-prompt only.
  double reprompt_s = 3.0;
  double chunk_limit_s = 30.0;
  // Absolute session positions at which single-session generation records
  // state bytes. Empty selects the first, middle and last generated step.
  std::vector<std::int64_t> probe_positions;

  // New tokens to emit: duration_to_tokens(target - prompt duration).
  std::int64_t continuation_tokens() const;
  // Throws InvalidArgument on a target shorter than the prompt, a re-prompt
  // that is not a whole number of frames, or a chunk limit not exceeding the
  // re-prompt.
  void validate() const;
};

struct ChunkRecord {
  // Offset of the chunk's first new token within the continuation.
  std::int64_t output_begin = 0;
  std::int64_t emitted = 0;
  // The tokens the chunk was conditioned on.
  std::vector<TokenId> context;
  std::uint64_t seed = 0;
};

struct StateProbe {
  std::int64_t position = 0;
  std::size_t state_bytes = 0;
};

struct GenerationResult {
  GenerationMode mode = GenerationMode::kSingleSession;
  std::uint64_t seed = 0;
  TokenStream continuation;
  std::vector<ChunkRecord> chunks;
  std::vector<StateProbe> state_probes;
};

// Chunk 1 conditions on the whole prompt and emits chunk_tokens new tokens.
// Every later chunk starts from a fresh state, conditions on the last
// reprompt_tokens of the sequence so far (the suffix of the previous chunk)
// and emits chunk_tokens - reprompt_tokens. Chunk k samples with
// derive_seed(seed, k). The concatenated output holds exactly total_tokens.
GenerationResult slide_and_prompt(const decoder::SequenceModel& model,
                                  const TokenStream& prompt,
                                  std::int64_t total_tokens,
                                  std::int64_t chunk_tokens,
                                  std::int64_t reprompt_tokens,
                                  const decoder::SamplingOptions& sampling,
                                  std::uint64_t seed);

// Single-session mode decodes the whole continuation in one state and
// requires a constant-state model; slide-and-prompt mode applies
// slide_and_prompt with chunk_limit_s and reprompt_s.
GenerationResult generate_long(const GenerationSpec& spec,
                               const decoder::SequenceModel& model);

void to_json(nlohmann::json& j, const GenerationResult& result);

}  // namespace longgen::longform
