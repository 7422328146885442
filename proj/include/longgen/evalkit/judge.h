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

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace longgen::evalkit {

enum class Verdict { kAMuchBetter, kABetter, kTie, kBBetter, kBMuchBetter };

// "A>>B", "A>B", "A=B", "B>A", "B>>A".
std::string_view verdict_label(Verdict verdict);

// Credit for the text shown in position A, in half points: 2, 2, 1, 0, 0.
int position_a_half_credit(Verdict verdict);

struct JudgeVerdict {
  Verdict label;
  std::string raw_response;
};

// The last "[[label]]" token in `response` whose label is one of the five
// verdicts; nullopt if there is none.
std::optional<Verdict> parse_verdict(std::string_view response);

// The pairwise comparison prompt with both texts substituted.
std::string render_judge_prompt(std::string_view text_a,
                                std::string_view text_b);

// Recovers (text A, text B) from a rendered prompt; nullopt if the section
// markers are missing.
std::optional<std::pair<std::string, std::string>> extract_judge_texts(
    std::string_view prompt);

// Text in, text out. Implementations must be callable concurrently.
class Judge {
 public:
  virtual ~Judge() = default;
  virtual std::string name() const = 0;
  // Throws JudgeError on transport failure.
  virtual std::string complete(const std::string& prompt) const = 0;
};

// Offline stand-in: the text with more distinct words is slightly better,
// equal counts tie. Symmetric under swapping A and B.
class MockJudge final : public Judge {
 public:
  std::string name() const override { return "mock"; }
  std::string complete(const std::string& prompt) const override;
};

struct HttpJudgeConfig {
  // Full URL of an OpenAI-compatible chat completions endpoint, e.g.
  // "https://host/v1/chat/completions".
  std::string endpoint;
  std::string model;
  // Name of the environment variable holding the bearer token; unset or empty
  // sends no Authorization header.
  std::string api_key_env = "LONGGEN_JUDGE_API_KEY";
  std::chrono::milliseconds timeout{60000};
  double temperature = 0.0;
};

class HttpJudge final : public Judge {
 public:
  explicit HttpJudge(HttpJudgeConfig config);
  std::string name() const override { return "http:" + config_.model; }
  std::string complete(const std::string& prompt) const override;

 private:
  HttpJudgeConfig config_;
  std::string base_url_;
  std::string path_;
};

struct TranscriptPair {
  std::string id;
  std::string text_a;
  std::string text_b;
};

enum class Presentation { kAB, kBA };

struct JudgmentRecord {
  std::string pair_id;
  Presentation order = Presentation::kAB;
  // nullopt marks a judge error (unparseable verdict or transport failure).
  std::optional<Verdict> verdict;
  std::size_t truncated_word_count = 0;
  std::string raw_response;
};

struct SideBySideResult {
  std::vector<JudgmentRecord> records;
  // Credit for side A over successful judgments, in half points.
  std::int64_t credit_halves = 0;
  std::int64_t judged = 0;
  std::int64_t judge_errors = 0;

  // 100 * credit_halves / (2 * judged); nullopt if nothing was judged.
  std::optional<double> win_percent() const;
};

struct SideBySideOptions {
  // Judgments in flight at once.
  int jobs = 1;
};

// Truncates both transcripts of every pair to the shorter one's word count,
// then judges each pair twice, once with A shown first and once with B shown
// first. A earns 1 for a better verdict in its favour, 0.5 for a tie.
SideBySideResult side_by_side(const std::vector<TranscriptPair>& pairs,
                              const Judge& judge,
                              const SideBySideOptions& options = {});

// JSON-lines: {pair_id, order, verdict, truncated_word_count}.
void write_judgment_records(std::ostream& out,
                            const std::vector<JudgmentRecord>& records);

void to_json(nlohmann::json& j, const JudgmentRecord& record);

}  // namespace longgen::evalkit
