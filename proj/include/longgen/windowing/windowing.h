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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "longgen/core/types.h"

namespace longgen::windowing {

// Half-open index range [begin, end).
struct Span {
  std::int64_t begin = 0;
  std::int64_t end = 0;

  std::int64_t length() const { return end - begin; }
  bool operator==(const Span&) const = default;
};

struct Window {
  Span source;  // indices fed to the tokenizer
  Span keep;    // indices this window contributes to the merged stream
  bool operator==(const Window&) const = default;
};

// Consecutive windows overlap by exactly `overlap`; keep ranges tile
// [0, stream_len) once. Each overlap is split at its midpoint: the first half
// is kept from the earlier window, the second half from the later one.
struct WindowPlan {
  std::int64_t stream_len = 0;
  std::int64_t width = 0;
  std::int64_t overlap = 0;
  std::vector<Window> windows;

  std::int64_t stride() const { return width - overlap; }
};

// Windows start at multiples of the stride until one reaches the stream end;
// the final window may be shorter than `width`. A stream no longer than one
// window yields a single window.
//
// Throws InvalidArgument unless 0 <= overlap < width and overlap is even.
WindowPlan plan_tokenization_windows(std::int64_t stream_len,
                                     std::int64_t width, std::int64_t overlap);

// Throws InvalidArgument if the keep ranges do not partition the stream or
// neighbouring windows do not overlap by exactly plan.overlap.
void check_plan(const WindowPlan& plan);

// Maps one window of input frames to one token per frame.
using WindowTokenizer =
    std::function<std::vector<TokenId>(std::span<const TokenId>)>;

std::vector<TokenId> identity_tokenizer(std::span<const TokenId> frames);

// Runs `tokenizer` on every source window. Windows are independent, so up to
// `jobs` of them run concurrently.
std::vector<std::vector<TokenId>> tokenize_windows(
    std::span<const TokenId> stream, const WindowPlan& plan,
    const WindowTokenizer& tokenizer, int jobs = 1);

// Concatenates the keep span of every window. windowed[i] must hold exactly
// plan.windows[i].source.length() tokens.
std::vector<TokenId> merge_windows(
    const std::vector<std::vector<TokenId>>& windowed, const WindowPlan& plan);

struct PaddingOptions {
  std::int64_t overlap = 0;
  // Drop tail_drop_seconds from the stream end before planning, as done when
  // preparing training data.
  bool dataset_mode = false;
  double tail_drop_seconds = 10.0;
  double frame_rate_hz = kDefaultFrameRateHz;
};

// A short final window is filled to full width with material copied from the
// stream start, so the tokenizer never sees the true end of the stream.
// Tokens produced over the copied material are dropped after tokenization.
struct EosAvoidancePlan {
  std::int64_t input_len = 0;
  // Length after the optional tail drop; the emitted stream covers
  // [0, effective_len).
  std::int64_t effective_len = 0;
  double tail_drop_seconds = 0.0;
  WindowPlan windows;
  Span pad_source;
  std::int64_t pad_length = 0;
  // Positions in padded-stream coordinates, i.e. [effective_len,
  // effective_len + pad_length).
  Span post_tokenize_drop;
};

// Throws InvalidArgument if the (tail-dropped) stream is shorter than width.
EosAvoidancePlan plan_final_window_padding(std::int64_t stream_len,
                                           std::int64_t width,
                                           const PaddingOptions& options = {});

// Tokenizes `stream` window by window under the padding plan and merges the
// result. With identity_tokenizer the output equals the first effective_len
// input frames.
std::vector<TokenId> tokenize_with_eos_avoidance(
    std::span<const TokenId> stream, std::int64_t width,
    const WindowTokenizer& tokenizer, const PaddingOptions& options = {});

struct SynthesisOptions {
  double prompt_s = 3.0;
  double width_s = 30.0;
  double overlap_s = 4.0;
  double frame_rate_hz = kDefaultFrameRateHz;
};

struct SynthesisWindow {
  Span prompt_prefix;  // frames of the speaker prompt
  Span content;        // continuation frames synthesized in this window
  Span keep;           // continuation frames kept from this window
};

// Every window synthesizes the fixed speaker-prompt prefix followed by
// width - prompt seconds of continuation. Continuation windows overlap by
// overlap_s, trimmed symmetrically, so each interior window keeps
// width - prompt - overlap seconds.
struct SynthesisPlan {
  double frame_rate_hz = kDefaultFrameRateHz;
  std::int64_t continuation_frames = 0;
  Span prompt_span;
  WindowPlan content_plan;
  std::vector<SynthesisWindow> windows;
  // Seconds from continuation start where consecutive keep spans meet.
  std::vector<double> boundary_times;
};

SynthesisPlan plan_synthesis_windows(double continuation_len_s,
                                     const SynthesisOptions& options = {});

// Produces the synthesized frames of a whole window: prompt prefix first,
// then one output frame per content frame.
using WindowSynthesizer = std::function<std::vector<TokenId>(
    std::span<const TokenId> prompt, std::span<const TokenId> content)>;

std::vector<TokenId> identity_synthesizer(std::span<const TokenId> prompt,
                                          std::span<const TokenId> content);

// Synthesizes every window, strips the prompt prefix, and keeps each
// window's keep span.
std::vector<TokenId> synthesize_windows(std::span<const TokenId> prompt,
                                        std::span<const TokenId> continuation,
                                        const SynthesisPlan& plan,
                                        const WindowSynthesizer& synthesizer);

enum class ProbeKind { kBoundary, kMidpoint };

struct ProbeSpan {
  ProbeKind kind;
  double start_s = 0.0;
  double end_s = 0.0;
};

// A span_s window centered at every chunk boundary and at the middle of every
// kept chunk, clamped to the continuation. Sorted by center.
std::vector<ProbeSpan> boundary_probe_spans(const SynthesisPlan& plan,
                                            double span_s = 5.0);

void to_json(nlohmann::json& j, const Span& span);
void to_json(nlohmann::json& j, const WindowPlan& plan);
void from_json(const nlohmann::json& j, WindowPlan& plan);
void to_json(nlohmann::json& j, const EosAvoidancePlan& plan);
void to_json(nlohmann::json& j, const SynthesisPlan& plan);
void to_json(nlohmann::json& j, const ProbeSpan& span);

}  // namespace longgen::windowing
