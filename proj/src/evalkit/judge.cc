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

#include "longgen/evalkit/judge.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <ostream>
#include <regex>
#include <set>
#include <thread>

#include "longgen/core/errors.h"
#include "longgen/evalkit/text.h"

namespace longgen::evalkit {
namespace {

constexpr std::string_view kTextAMarker = "## ---------- Text A ----------";
constexpr std::string_view kTextBMarker = "## ---------- Text B ----------";
constexpr std::string_view kClosingMarker =
    "## ---------- Detailed Comparison of Continuations ----------";

constexpr std::string_view kInstructions =
    R"(# Instructions

Please act as an impartial judge and evaluate the quality of two texts which occur in the context of a book. These texts are transcribed from audio recordings that were truncated to a fixed duration. Your job is to consider the following criteria to evaluate which text is better:
- Fluency: How grammatically correct is the text?
- Coherence: How well do the sentences of the text fit together?
- Logicality: How much does the text obey common sense?
- Interestingness: How enjoyable is the text to read?

First, read text A and consider its fluency, coherence, logicality, and interestingness. Do not penalize the text for ending mid-sentence or mid-paragraph.

Then, read text B and consider its fluency, coherence, logicality, and interestingness. Do not penalize the text for ending mid-sentence or mid-paragraph.

Afterwards, compare the fluency, coherence, logicality, and interestingness of the two texts. Do not penalize either text for ending mid-sentence or mid-paragraph.

Finally, after providing your explanations, you must output only one of the following choices as your final verdict with a label:
1. Text A is significantly better: [[A>>B]]
2. Text A is slightly better: [[A>B]]
3. Tie, relatively the same: [[A=B]]
4. Text B is slightly better: [[B>A]]
5. Text B is significantly better: [[B>>A]]

Example output: "My final verdict is tie: [[A=B]]".

# Comparison task

)";

std::string trim(std::string_view s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  const auto first = std::find_if(s.begin(), s.end(), not_space);
  const auto last = std::find_if(s.rbegin(), s.rend(), not_space).base();
  return first < last ? std::string(first, last) : std::string();
}

std::size_t distinct_words(std::string_view text) {
  const std::vector<std::string> words = split_words(text);
  return std::set<std::string>(words.begin(), words.end()).size();
}

}  // namespace

std::string_view verdict_label(Verdict verdict) {
  switch (verdict) {
    case Verdict::kAMuchBetter:
      return "A>>B";
    case Verdict::kABetter:
      return "A>B";
    case Verdict::kTie:
      return "A=B";
    case Verdict::kBBetter:
      return "B>A";
    case Verdict::kBMuchBetter:
      return "B>>A";
  }
  return "?";
}

int position_a_half_credit(Verdict verdict) {
  switch (verdict) {
    case Verdict::kAMuchBetter:
    case Verdict::kABetter:
      return 2;
    case Verdict::kTie:
      return 1;
    default:
      return 0;
  }
}

std::optional<Verdict> parse_verdict(std::string_view response) {
  static const std::regex kToken(R"(\[\[(A>>B|A>B|A=B|B>A|B>>A)\]\])");
  std::optional<Verdict> last;
  const std::string text(response);
  for (auto it = std::sregex_iterator(text.begin(), text.end(), kToken);
       it != std::sregex_iterator(); ++it) {
    const std::string label = (*it)[1];
    for (Verdict v : {Verdict::kAMuchBetter, Verdict::kABetter, Verdict::kTie,
                      Verdict::kBBetter, Verdict::kBMuchBetter}) {
      if (verdict_label(v) == label) last = v;
    }
  }
  return last;
}

std::string render_judge_prompt(std::string_view text_a,
                                std::string_view text_b) {
  std::string out(kInstructions);
  out.append(kTextAMarker).append("\n\n").append(text_a).append("\n\n");
  out.append(kTextBMarker).append("\n\n").append(text_b).append("\n\n");
  out.append(kClosingMarker).append("\n");
  return out;
}

std::optional<std::pair<std::string, std::string>> extract_judge_texts(
    std::string_view prompt) {
  const std::size_t a = prompt.find(kTextAMarker);
  const std::size_t b = prompt.find(kTextBMarker);
  const std::size_t end = prompt.find(kClosingMarker);
  if (a == std::string_view::npos || b == std::string_view::npos ||
      end == std::string_view::npos || !(a < b && b < end)) {
    return std::nullopt;
  }
  const std::size_t a_body = a + kTextAMarker.size();
  const std::size_t b_body = b + kTextBMarker.size();
  return std::make_pair(trim(prompt.substr(a_body, b - a_body)),
                        trim(prompt.substr(b_body, end - b_body)));
}

std::string MockJudge::complete(const std::string& prompt) const {
  const auto texts = extract_judge_texts(prompt);
  if (!texts) return "I cannot find the two texts to compare.";
  const std::size_t a = distinct_words(texts->first);
  const std::size_t b = distinct_words(texts->second);
  std::string verdict;
  if (a > b) {
    verdict = "Text A is slightly better: [[A>B]]";
  } else if (b > a) {
    verdict = "Text B is slightly better: [[B>A]]";
  } else {
    verdict = "tie: [[A=B]]";
  }
  return "Text A uses " + std::to_string(a) + " distinct words and text B " +
         std::to_string(b) + ".\n\nMy final verdict is " + verdict;
}

std::optional<double> SideBySideResult::win_percent() const {
  if (judged == 0) return std::nullopt;
  return 100.0 * static_cast<double>(credit_halves) /
         (2.0 * static_cast<double>(judged));
}

SideBySideResult side_by_side(const std::vector<TranscriptPair>& pairs,
                              const Judge& judge,
                              const SideBySideOptions& options) {
  struct Task {
    std::size_t pair;
    Presentation order;
    std::string prompt;
  };
  std::vector<Task> tasks;
  SideBySideResult result;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::vector<std::string> a = split_words(pairs[i].text_a);
    const std::vector<std::string> b = split_words(pairs[i].text_b);
    const std::size_t n = std::min(a.size(), b.size());
    const std::string ta = join_words(a, 0, n);
    const std::string tb = join_words(b, 0, n);
    tasks.push_back({i, Presentation::kAB, render_judge_prompt(ta, tb)});
    tasks.push_back({i, Presentation::kBA, render_judge_prompt(tb, ta)});
    for (Presentation order : {Presentation::kAB, Presentation::kBA}) {
      JudgmentRecord record;
      record.pair_id = pairs[i].id;
      record.order = order;
      record.truncated_word_count = n;
      result.records.push_back(std::move(record));
    }
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      JudgmentRecord& record = result.records[t];
      try {
        record.raw_response = judge.complete(tasks[t].prompt);
        record.verdict = parse_verdict(record.raw_response);
      } catch (const JudgeError& e) {
        record.raw_response = e.what();
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int jobs = std::max(1, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int i = 0; i < jobs; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (const JudgmentRecord& record : result.records) {
    if (!record.verdict) {
      ++result.judge_errors;
      continue;
    }
    const int shown_first = position_a_half_credit(*record.verdict);
    result.credit_halves +=
        record.order == Presentation::kAB ? shown_first : 2 - shown_first;
    ++result.judged;
  }
  return result;
}

void to_json(nlohmann::json& j, const JudgmentRecord& record) {
  j = {{"pair_id", record.pair_id},
       {"order", record.order == Presentation::kAB ? "AB" : "BA"},
       {"verdict", record.verdict
                       ? nlohmann::json(std::string(verdict_label(*record.verdict)))
                       : nlohmann::json("judge-error")},
       {"truncated_word_count", record.truncated_word_count}};
}

void write_judgment_records(std::ostream& out,
                            const std::vector<JudgmentRecord>& records) {
  for (const JudgmentRecord& record : records) {
    out << nlohmann::json(record).dump() << '\n';
  }
}

}  // namespace longgen::evalkit
