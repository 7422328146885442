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

#include <random>

#include <gtest/gtest.h>

#include "longgen/core/errors.h"

namespace longgen::windowing {
namespace {

std::vector<TokenId> iota_stream(std::int64_t n) {
  std::vector<TokenId> v(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] =
      static_cast<TokenId>(i);
  return v;
}

TEST(TokenizationWindows, SmallFixtureKeepRanges) {
  const WindowPlan plan = plan_tokenization_windows(11, 5, 2);
  ASSERT_EQ(plan.windows.size(), 3u);
  EXPECT_EQ(plan.windows[0].source, (Span{0, 5}));
  EXPECT_EQ(plan.windows[1].source, (Span{3, 8}));
  EXPECT_EQ(plan.windows[2].source, (Span{6, 11}));
  EXPECT_EQ(plan.windows[0].keep, (Span{0, 4}));
  EXPECT_EQ(plan.windows[1].keep, (Span{4, 7}));
  EXPECT_EQ(plan.windows[2].keep, (Span{7, 11}));
  EXPECT_NO_THROW(check_plan(plan));
}

TEST(TokenizationWindows, OverlapSwitchesAtMidpoint) {
  const WindowPlan plan = plan_tokenization_windows(100, 40, 10);
  for (std::size_t i = 1; i < plan.windows.size(); ++i) {
    const Window& prev = plan.windows[i - 1];
    const Window& cur = plan.windows[i];
    EXPECT_EQ(prev.keep.end, (cur.source.begin + prev.source.end) / 2);
    EXPECT_EQ(cur.keep.begin, prev.keep.end);
  }
}

TEST(TokenizationWindows, ShortStreamIsOneWindow) {
  const WindowPlan plan = plan_tokenization_windows(500, 750, 100);
  ASSERT_EQ(plan.windows.size(), 1u);
  EXPECT_EQ(plan.windows[0].keep, (Span{0, 500}));
}

TEST(TokenizationWindows, RejectsBadOverlap) {
  EXPECT_THROW(plan_tokenization_windows(10, 5, 5), InvalidArgument);
  EXPECT_THROW(plan_tokenization_windows(10, 5, -2), InvalidArgument);
  EXPECT_THROW(plan_tokenization_windows(10, 5, 3), InvalidArgument);
  EXPECT_THROW(plan_tokenization_windows(10, 0, 0), InvalidArgument);
}

TEST(TokenizationWindows, RandomizedIdentityRoundTrip) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::int64_t width = std::uniform_int_distribution<int>(2, 80)(rng);
    const std::int64_t overlap =
        2 * std::uniform_int_distribution<int>(0, static_cast<int>((width - 1) / 2))(rng);
    const std::int64_t len = std::uniform_int_distribution<int>(0, 600)(rng);
    const WindowPlan plan = plan_tokenization_windows(len, width, overlap);
    check_plan(plan);
    const std::vector<TokenId> stream = iota_stream(len);
    const auto merged = merge_windows(
        tokenize_windows(stream, plan, identity_tokenizer, trial % 3 + 1),
        plan);
    ASSERT_EQ(merged, stream) << "len=" << len << " width=" << width
                              << " overlap=" << overlap;
  }
}

TEST(TokenizationWindows, MergeRejectsWrongWindowLength) {
  const WindowPlan plan = plan_tokenization_windows(11, 5, 2);
  std::vector<std::vector<TokenId>> windowed(3, std::vector<TokenId>(5));
  windowed[1].pop_back();
  EXPECT_THROW(merge_windows(windowed, plan), InvalidArgument);
}

TEST(TokenizationWindows, JsonRoundTrip) {
  const WindowPlan plan = plan_tokenization_windows(100, 30, 6);
  const WindowPlan back = nlohmann::json(plan).get<WindowPlan>();
  EXPECT_EQ(back.windows, plan.windows);
  nlohmann::json bad = plan;
  bad["windows"][1]["keep"][0] = 5;
  EXPECT_THROW(bad.get<WindowPlan>(), InvalidArgument);
}

TEST(EosAvoidance, PadsShortFinalWindowFromStreamStart) {
  const EosAvoidancePlan plan = plan_final_window_padding(1250, 750);
  EXPECT_EQ(plan.windows.windows.back().source.length(), 500);
  EXPECT_EQ(plan.pad_length, 250);
  EXPECT_EQ(plan.pad_source, (Span{0, 250}));
  EXPECT_EQ(plan.post_tokenize_drop, (Span{1250, 1500}));
}

TEST(EosAvoidance, MultipleOfStrideNeedsNoPadding) {
  EXPECT_EQ(plan_final_window_padding(1500, 750).pad_length, 0);
}

TEST(EosAvoidance, DatasetModeDropsTail) {
  PaddingOptions options;
  options.dataset_mode = true;
  const EosAvoidancePlan plan = plan_final_window_padding(2000, 750, options);
  EXPECT_EQ(plan.effective_len, 1750);
  EXPECT_EQ(plan.pad_length, 500);
}

TEST(EosAvoidance, TooShortThrows) {
  EXPECT_THROW(plan_final_window_padding(700, 750), InvalidArgument);
}

TEST(EosAvoidance, FinalWindowSeesPaddingNotStreamEnd) {
  const std::vector<TokenId> stream = iota_stream(1250);
  std::vector<std::vector<TokenId>> seen;
  auto recording = [&](std::span<const TokenId> frames) {
    seen.emplace_back(frames.begin(), frames.end());
    return identity_tokenizer(frames);
  };
  const auto out = tokenize_with_eos_avoidance(stream, 750, recording);
  EXPECT_EQ(out, stream);
  ASSERT_EQ(seen.size(), 2u);
  ASSERT_EQ(seen[1].size(), 750u);
  EXPECT_EQ(seen[1][499], 1249);
  EXPECT_EQ(seen[1][500], 0);
  EXPECT_EQ(seen[1][749], 249);
}

TEST(Synthesis, DefaultBoundaries) {
  const SynthesisPlan plan = plan_synthesis_windows(240.0);
  ASSERT_GE(plan.boundary_times.size(), 4u);
  EXPECT_EQ(plan.boundary_times[0], 25.0);
  EXPECT_EQ(plan.boundary_times[1], 48.0);
  EXPECT_EQ(plan.boundary_times[2], 71.0);
  EXPECT_EQ(plan.boundary_times[3], 94.0);
  for (std::size_t n = 0; n < plan.boundary_times.size(); ++n) {
    EXPECT_EQ(plan.boundary_times[n], 25.0 + 23.0 * static_cast<double>(n));
  }
  for (const SynthesisWindow& w : plan.windows) {
    EXPECT_EQ(w.prompt_prefix, (Span{0, 75}));
    EXPECT_LE(w.content.length(), 675);
  }
}

TEST(Synthesis, ShortContinuationIsOneWindow) {
  const SynthesisPlan plan = plan_synthesis_windows(20.0);
  EXPECT_EQ(plan.windows.size(), 1u);
  EXPECT_TRUE(plan.boundary_times.empty());
}

TEST(Synthesis, IdentityRoundTrip) {
  const SynthesisPlan plan = plan_synthesis_windows(100.0);
  const std::vector<TokenId> prompt(75, -1);
  const std::vector<TokenId> continuation = iota_stream(2500);
  EXPECT_EQ(synthesize_windows(prompt, continuation, plan,
                               identity_synthesizer),
            continuation);
}

TEST(Synthesis, ProbeSpans) {
  const SynthesisPlan plan = plan_synthesis_windows(240.0);
  const auto spans = boundary_probe_spans(plan);
  EXPECT_EQ(spans.size(), plan.boundary_times.size() + plan.windows.size());
  bool found = false;
  for (const ProbeSpan& s : spans) {
    EXPECT_GE(s.start_s, 0.0);
    EXPECT_LE(s.end_s, 240.0);
    if (s.kind == ProbeKind::kBoundary && s.start_s == 22.5) {
      EXPECT_EQ(s.end_s, 27.5);
      found = true;
    }
  }
  EXPECT_TRUE(found);
  for (std::size_t i = 1; i < spans.size(); ++i) {
    EXPECT_LE(spans[i - 1].start_s + spans[i - 1].end_s,
              spans[i].start_s + spans[i].end_s);
  }
}

}  // namespace
}  // namespace longgen::windowing
