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

#include "longgen/windowing/windowing.h"

#include <algorithm>
#include <future>

#include "longgen/core/errors.h"

namespace longgen::windowing {

WindowPlan plan_tokenization_windows(std::int64_t stream_len,
                                     std::int64_t width,
                                     std::int64_t overlap) {
  if (stream_len < 0) throw InvalidArgument("stream length must be >= 0");
  if (width <= 0) throw InvalidArgument("window width must be positive");
  if (overlap < 0 || overlap >= width) {
    throw InvalidArgument("overlap must be in [0, width)");
  }
  if (overlap % 2 != 0) {
    throw InvalidArgument("overlap must be even so it splits at a midpoint");
  }
  WindowPlan plan{stream_len, width, overlap, {}};
  if (stream_len <= width) {
    plan.windows.push_back({{0, stream_len}, {0, stream_len}});
    return plan;
  }
  const std::int64_t stride = width - overlap;
  const std::int64_t half = overlap / 2;
  for (std::int64_t start = 0;; start += stride) {
    const std::int64_t end = std::min(start + width, stream_len);
    const std::int64_t keep_begin = start == 0 ? 0 : start + half;
    const bool last = end == stream_len;
    const std::int64_t keep_end = last ? end : end - half;
    plan.windows.push_back({{start, end}, {keep_begin, keep_end}});
    if (last) break;
  }
  return plan;
}

void check_plan(const WindowPlan& plan) {
  if (plan.windows.empty()) throw InvalidArgument("plan has no windows");
  std::int64_t cursor = 0;
  for (std::size_t i = 0; i < plan.windows.size(); ++i) {
    const Window& w = plan.windows[i];
    if (w.keep.begin != cursor || w.keep.end < w.keep.begin ||
        w.keep.begin < w.source.begin || w.keep.end > w.source.end) {
      throw InvalidArgument("keep ranges do not tile the stream at window " +
                            std::to_string(i));
    }
    if (i > 0 && plan.windows[i - 1].source.end - w.source.begin !=
                     plan.overlap) {
      throw InvalidArgument("windows " + std::to_string(i - 1) + " and " +
                            std::to_string(i) +
                            " do not overlap by the planned amount");
    }
    cursor = w.keep.end;
  }
  if (cursor != plan.stream_len) {
    throw InvalidArgument("keep ranges stop short of the stream end");
  }
}

std::vector<TokenId> identity_tokenizer(std::span<const TokenId> frames) {
  return {frames.begin(), frames.end()};
}

std::vector<std::vector<TokenId>> tokenize_windows(
    std::span<const TokenId> stream, const WindowPlan& plan,
    const WindowTokenizer& tokenizer, int jobs) {
  if (static_cast<std::int64_t>(stream.size()) != plan.stream_len) {
    throw InvalidArgument("stream length differs from the plan");
  }
  std::vector<std::vector<TokenId>> out(plan.windows.size());
  auto run = [&](std::size_t i) {
    const Span s = plan.windows[i].source;
    out[i] = tokenizer(stream.subspan(static_cast<std::size_t>(s.begin),
                                      static_cast<std::size_t>(s.length())));
  };
  if (jobs <= 1) {
    for (std::size_t i = 0; i < out.size(); ++i) run(i);
    return out;
  }
  for (std::size_t first = 0; first < out.size();
       first += static_cast<std::size_t>(jobs)) {
    std::vector<std::future<void>> batch;
    const std::size_t last =
        std::min(out.size(), first + static_cast<std::size_t>(jobs));
    for (std::size_t i = first; i < last; ++i) {
      batch.push_back(std::async(std::launch::async, run, i));
    }
    for (auto& f : batch) f.get();
  }
  return out;
}

std::vector<TokenId> merge_windows(
    const std::vector<std::vector<TokenId>>& windowed, const WindowPlan& plan) {
  if (windowed.size() != plan.windows.size()) {
    throw InvalidArgument("expected " + std::to_string(plan.windows.size()) +
                          " tokenized windows, got " +
                          std::to_string(windowed.size()));
  }
  std::vector<TokenId> out;
  out.reserve(static_cast<std::size_t>(plan.stream_len));
  for (std::size_t i = 0; i < windowed.size(); ++i) {
    const Window& w = plan.windows[i];
    if (static_cast<std::int64_t>(windowed[i].size()) != w.source.length()) {
      throw InvalidArgument("window " + std::to_string(i) + " holds " +
                            std::to_string(windowed[i].size()) +
                            " tokens, expected " +
                            std::to_string(w.source.length()));
    }
    const auto first = windowed[i].begin() + (w.keep.begin - w.source.begin);
    out.insert(out.end(), first, first + w.keep.length());
  }
  return out;
}

EosAvoidancePlan plan_final_window_padding(std::int64_t stream_len,
                                           std::int64_t width,
                                           const PaddingOptions& options) {
  EosAvoidancePlan plan;
  plan.input_len = stream_len;
  plan.effective_len = stream_len;
  if (options.dataset_mode) {
    plan.tail_drop_seconds = options.tail_drop_seconds;
    plan.effective_len -=
        duration_to_tokens(options.tail_drop_seconds, options.frame_rate_hz);
  }
  if (plan.effective_len < width) {
    throw InvalidArgument("stream of " + std::to_string(plan.effective_len) +
                          " frames is shorter than one window of " +
                          std::to_string(width));
  }
  plan.windows =
      plan_tokenization_windows(plan.effective_len, width, options.overlap);
  const Window& last = plan.windows.windows.back();
  plan.pad_length = width - last.source.length();
  plan.pad_source = {0, plan.pad_length};
  plan.post_tokenize_drop = {plan.effective_len,
                             plan.effective_len + plan.pad_length};
  return plan;
}

std::vector<TokenId> tokenize_with_eos_avoidance(
    std::span<const TokenId> stream, std::int64_t width,
    const WindowTokenizer& tokenizer, const PaddingOptions& options) {
  const EosAvoidancePlan plan = plan_final_window_padding(
      static_cast<std::int64_t>(stream.size()), width, options);
  const auto effective =
      stream.first(static_cast<std::size_t>(plan.effective_len));
  std::vector<std::vector<TokenId>> windowed;
  windowed.reserve(plan.windows.windows.size());
  for (const Window& w : plan.windows.windows) {
    const auto source = effective.subspan(
        static_cast<std::size_t>(w.source.begin),
        static_cast<std::size_t>(w.source.length()));
    const bool padded = w.source.end == plan.effective_len &&
                        plan.pad_length > 0;
    if (!padded) {
      windowed.push_back(tokenizer(source));
      continue;
    }
    std::vector<TokenId> input(source.begin(), source.end());
    input.insert(input.end(), effective.begin(),
                 effective.begin() + plan.pad_length);
    std::vector<TokenId> tokens = tokenizer(input);
    if (static_cast<std::int64_t>(tokens.size()) != width) {
      throw InvalidArgument("tokenizer must emit one token per frame");
    }
    tokens.resize(static_cast<std::size_t>(w.source.length()));
    windowed.push_back(std::move(tokens));
  }
  return merge_windows(windowed, plan.windows);
}

SynthesisPlan plan_synthesis_windows(double continuation_len_s,
                                     const SynthesisOptions& options) {
  if (!(options.prompt_s > 0) || !(options.width_s > options.prompt_s) ||
      !(options.overlap_s > 0)) {
    throw InvalidArgument(
        "synthesis needs positive prompt, overlap and width > prompt");
  }
  const double rate = options.frame_rate_hz;
  SynthesisPlan plan;
  plan.frame_rate_hz = rate;
  plan.continuation_frames = duration_to_tokens(continuation_len_s, rate);
  const std::int64_t prompt = duration_to_tokens(options.prompt_s, rate);
  const std::int64_t content =
      duration_to_tokens(options.width_s, rate) - prompt;
  const std::int64_t overlap = duration_to_tokens(options.overlap_s, rate);
  plan.prompt_span = {0, prompt};
  plan.content_plan =
      plan_tokenization_windows(plan.continuation_frames, content, overlap);
  for (const Window& w : plan.content_plan.windows) {
    plan.windows.push_back({plan.prompt_span, w.source, w.keep});
  }
  for (std::size_t i = 0; i + 1 < plan.windows.size(); ++i) {
    plan.boundary_times.push_back(
        static_cast<double>(plan.windows[i].keep.end) / rate);
  }
  return plan;
}

std::vector<TokenId> identity_synthesizer(std::span<const TokenId> prompt,
                                          std::span<const TokenId> content) {
  std::vector<TokenId> out(prompt.begin(), prompt.end());
  out.insert(out.end(), content.begin(), content.end());
  return out;
}

std::vector<TokenId> synthesize_windows(std::span<const TokenId> prompt,
                                        std::span<const TokenId> continuation,
                                        const SynthesisPlan& plan,
                                        const WindowSynthesizer& synthesizer) {
  if (static_cast<std::int64_t>(prompt.size()) < plan.prompt_span.end) {
    throw InvalidArgument("speaker prompt shorter than the planned prefix");
  }
  if (static_cast<std::int64_t>(continuation.size()) !=
      plan.continuation_frames) {
    throw InvalidArgument("continuation length differs from the plan");
  }
  const auto prefix = prompt.first(
      static_cast<std::size_t>(plan.prompt_span.length()));
  std::vector<std::vector<TokenId>> windowed;
  for (const SynthesisWindow& w : plan.windows) {
    std::vector<TokenId> frames = synthesizer(
        prefix, continuation.subspan(static_cast<std::size_t>(w.content.begin),
                                     static_cast<std::size_t>(
                                         w.content.length())));
    if (static_cast<std::int64_t>(frames.size()) !=
        w.prompt_prefix.length() + w.content.length()) {
      throw InvalidArgument("synthesizer output length mismatch");
    }
    frames.erase(frames.begin(), frames.begin() + w.prompt_prefix.length());
    windowed.push_back(std::move(frames));
  }
  return merge_windows(windowed, plan.content_plan);
}

std::vector<ProbeSpan> boundary_probe_spans(const SynthesisPlan& plan,
                                            double span_s) {
  if (!(span_s > 0)) throw InvalidArgument("probe span must be positive");
  const double rate = plan.frame_rate_hz;
  const double total = static_cast<double>(plan.continuation_frames) / rate;
  auto centered = [&](ProbeKind kind, double center) {
    return ProbeSpan{kind, std::max(0.0, center - span_s / 2),
                     std::min(total, center + span_s / 2)};
  };
  std::vector<ProbeSpan> spans;
  for (std::size_t i = 0; i < plan.windows.size(); ++i) {
    const Span keep = plan.windows[i].keep;
    spans.push_back(centered(
        ProbeKind::kMidpoint,
        static_cast<double>(keep.begin + keep.end) / (2.0 * rate)));
    if (i < plan.boundary_times.size()) {
      spans.push_back(centered(ProbeKind::kBoundary, plan.boundary_times[i]));
    }
  }
  return spans;
}

void to_json(nlohmann::json& j, const Span& span) {
  j = nlohmann::json::array({span.begin, span.end});
}

void to_json(nlohmann::json& j, const WindowPlan& plan) {
  nlohmann::json windows = nlohmann::json::array();
  for (const Window& w : plan.windows) {
    windows.push_back({{"source", w.source}, {"keep", w.keep}});
  }
  j = {{"stream_len", plan.stream_len},
       {"width", plan.width},
       {"overlap", plan.overlap},
       {"stride", plan.stride()},
       {"windows", windows}};
}

void from_json(const nlohmann::json& j, WindowPlan& plan) {
  try {
    plan.stream_len = j.at("stream_len").get<std::int64_t>();
    plan.width = j.at("width").get<std::int64_t>();
    plan.overlap = j.at("overlap").get<std::int64_t>();
    plan.windows.clear();
    for (const auto& w : j.at("windows")) {
      const auto s = w.at("source").get<std::vector<std::int64_t>>();
      const auto k = w.at("keep").get<std::vector<std::int64_t>>();
      if (s.size() != 2 || k.size() != 2) {
        throw InvalidArgument("window spans must be [begin, end] pairs");
      }
      plan.windows.push_back({{s[0], s[1]}, {k[0], k[1]}});
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed window plan: ") + e.what());
  }
  check_plan(plan);
}

void to_json(nlohmann::json& j, const EosAvoidancePlan& plan) {
  j = {{"input_len", plan.input_len},
       {"effective_len", plan.effective_len},
       {"tail_drop_seconds", plan.tail_drop_seconds},
       {"pad_source", plan.pad_source},
       {"pad_length", plan.pad_length},
       {"post_tokenize_drop", plan.post_tokenize_drop},
       {"windows", plan.windows}};
}

void to_json(nlohmann::json& j, const SynthesisPlan& plan) {
  nlohmann::json windows = nlohmann::json::array();
  for (const SynthesisWindow& w : plan.windows) {
    windows.push_back({{"prompt_prefix", w.prompt_prefix},
                       {"content", w.content},
                       {"keep", w.keep}});
  }
  j = {{"frame_rate_hz", plan.frame_rate_hz},
       {"continuation_frames", plan.continuation_frames},
       {"prompt_span", plan.prompt_span},
       {"windows", windows},
       {"boundary_times", plan.boundary_times}};
}

void to_json(nlohmann::json& j, const ProbeSpan& span) {
  j = {{"kind", span.kind == ProbeKind::kBoundary ? "boundary" : "midpoint"},
       {"start_s", span.start_s},
       {"end_s", span.end_s}};
}

}  // namespace longgen::windowing
