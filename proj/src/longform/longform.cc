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

#include "longgen/longform/longform.h"

#include <algorithm>
#include <cmath>

#include "longgen/core/errors.h"

namespace longgen::longform {

std::string_view generation_mode_name(GenerationMode mode) {
  return mode == GenerationMode::kSingleSession ? "single_session"
                                                : "slide_and_prompt";
}

GenerationMode parse_generation_mode(std::string_view name) {
  if (name == "single_session") return GenerationMode::kSingleSession;
  if (name == "slide_and_prompt") return GenerationMode::kSlideAndPrompt;
  throw InvalidArgument("unknown generation mode '" + std::string(name) + "'");
}

std::int64_t GenerationSpec::continuation_tokens() const {
  return duration_to_tokens(target_duration_s - prompt.duration_s(),
                            prompt.frame_rate_hz);
}

void GenerationSpec::validate() const {
  if (!(prompt.frame_rate_hz > 0)) {
    throw InvalidArgument("prompt frame rate must be positive");
  }
  if (!(target_duration_s >= prompt.duration_s())) {
    throw InvalidArgument("target duration is shorter than the prompt");
  }
  sampling.validate();
  if (mode != GenerationMode::kSlideAndPrompt) return;
  const double frames = reprompt_s * prompt.frame_rate_hz;
  if (!(reprompt_s > 0) || std::abs(frames - std::round(frames)) > 1e-9) {
    throw InvalidArgument("re-prompt must be a positive whole number of frames");
  }
  if (!(chunk_limit_s > reprompt_s)) {
    throw InvalidArgument("chunk limit must exceed the re-prompt length");
  }
}

GenerationResult slide_and_prompt(const decoder::SequenceModel& model,
                                  const TokenStream& prompt,
                                  std::int64_t total_tokens,
                                  std::int64_t chunk_tokens,
                                  std::int64_t reprompt_tokens,
                                  const decoder::SamplingOptions& sampling,
                                  std::uint64_t seed) {
  if (total_tokens < 0) throw InvalidArgument("total tokens must be >= 0");
  if (reprompt_tokens < 1 || reprompt_tokens >= chunk_tokens) {
    throw InvalidArgument("need 0 < reprompt_tokens < chunk_tokens");
  }
  prompt.validate(model.vocab_size());
  GenerationResult result;
  result.mode = GenerationMode::kSlideAndPrompt;
  result.seed = seed;
  result.continuation.frame_rate_hz = prompt.frame_rate_hz;
  std::vector<TokenId>& out = result.continuation.ids;
  out.reserve(static_cast<std::size_t>(total_tokens));

  std::vector<TokenId> history = prompt.ids;
  for (std::uint64_t k = 1;
       static_cast<std::int64_t>(out.size()) < total_tokens; ++k) {
    ChunkRecord chunk;
    chunk.output_begin = static_cast<std::int64_t>(out.size());
    chunk.seed = derive_seed(seed, k);
    std::int64_t budget = chunk_tokens;
    if (k == 1) {
      chunk.context = prompt.ids;
    } else {
      const auto keep = std::min<std::size_t>(
          history.size(), static_cast<std::size_t>(reprompt_tokens));
      chunk.context.assign(history.end() - static_cast<std::ptrdiff_t>(keep),
                           history.end());
      budget -= reprompt_tokens;
    }
    chunk.emitted = std::min(budget, total_tokens - chunk.output_begin);

    decoder::DecoderSession session(model, sampling, chunk.seed);
    session.feed(chunk.context);
    for (std::int64_t i = 0; i < chunk.emitted; ++i) {
      const TokenId t = session.emit();
      out.push_back(t);
      history.push_back(t);
    }
    result.chunks.push_back(std::move(chunk));
  }
  return result;
}

namespace {

GenerationResult single_session(const GenerationSpec& spec,
                                const decoder::SequenceModel& model) {
  if (!model.constant_state()) {
    throw InvalidArgument(
        "single-session generation requires a constant-state model");
  }
  spec.prompt.validate(model.vocab_size());
  const std::int64_t n = spec.continuation_tokens();
  const auto prompt_len = static_cast<std::int64_t>(spec.prompt.size());
  std::vector<std::int64_t> probes = spec.probe_positions;
  if (probes.empty() && n > 0) {
    probes = {prompt_len + 1, prompt_len + (n + 1) / 2, prompt_len + n};
  }
  std::sort(probes.begin(), probes.end());
  probes.erase(std::unique(probes.begin(), probes.end()), probes.end());

  GenerationResult result;
  result.mode = GenerationMode::kSingleSession;
  result.seed = spec.seed;
  result.continuation.frame_rate_hz = spec.prompt.frame_rate_hz;
  result.continuation.ids.reserve(static_cast<std::size_t>(n));
  decoder::DecoderSession session(model, spec.sampling, spec.seed);
  session.feed(spec.prompt.ids);
  auto next_probe = probes.begin();
  while (next_probe != probes.end() && *next_probe <= session.position()) {
    result.state_probes.push_back({session.position(), session.state_bytes()});
    ++next_probe;
  }
  for (std::int64_t i = 0; i < n; ++i) {
    result.continuation.ids.push_back(session.emit());
    if (next_probe != probes.end() && *next_probe == session.position()) {
      result.state_probes.push_back(
          {session.position(), session.state_bytes()});
      ++next_probe;
    }
  }
  result.chunks.push_back({0, n, spec.prompt.ids, spec.seed});
  return result;
}

}  // namespace

GenerationResult generate_long(const GenerationSpec& spec,
                               const decoder::SequenceModel& model) {
  spec.validate();
  if (spec.mode == GenerationMode::kSingleSession) {
    return single_session(spec, model);
  }
  const double rate = spec.prompt.frame_rate_hz;
  return slide_and_prompt(model, spec.prompt, spec.continuation_tokens(),
                          duration_to_tokens(spec.chunk_limit_s, rate),
                          duration_to_tokens(spec.reprompt_s, rate),
                          spec.sampling, spec.seed);
}

void to_json(nlohmann::json& j, const GenerationResult& result) {
  nlohmann::json chunks = nlohmann::json::array();
  for (const ChunkRecord& c : result.chunks) {
    chunks.push_back({{"output_begin", c.output_begin},
                      {"emitted", c.emitted},
                      {"context_tokens", c.context.size()},
                      {"seed", c.seed}});
  }
  nlohmann::json probes = nlohmann::json::array();
  for (const StateProbe& p : result.state_probes) {
    probes.push_back({{"position", p.position},
                      {"state_bytes", p.state_bytes}});
  }
  j = {{"mode", generation_mode_name(result.mode)},
       {"seed", result.seed},
       {"continuation_tokens", result.continuation.size()},
       {"chunks", chunks},
       {"state_probes", probes}};
}

}  // namespace longgen::longform
