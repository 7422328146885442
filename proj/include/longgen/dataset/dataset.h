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

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace longgen::dataset {

struct UtteranceRecord {
  std::string utterance_id;
  std::string chapter_id;
  std::string speaker_id;
  double start_s = 0.0;
  double end_s = 0.0;
  std::string transcript;

  double duration_s() const { return end_s - start_s; }
};

using UtteranceManifest = std::vector<UtteranceRecord>;

// Throws ManifestError unless every record has end > start and, within each
// chapter, records are sorted by start time and do not overlap.
void validate_manifest(const UtteranceManifest& manifest);

// JSON-lines with the UtteranceRecord field names. Throws ManifestError on a
// malformed line, naming its line number.
UtteranceManifest read_manifest_jsonl(std::istream& in);
void write_manifest_jsonl(std::ostream& out, const UtteranceManifest& manifest);

// CSV with a header row naming the same six columns in any order. Fields may
// be double-quoted; "" inside quotes is a literal quote.
UtteranceManifest read_manifest_csv(std::istream& in);

// Reads .csv by extension, JSON-lines otherwise.
UtteranceManifest read_manifest_file(const std::string& path);

struct Span {
  std::string span_id;  // "<chapter>_<k>", k counting from 0 per chapter
  std::string chapter_id;
  std::string speaker_id;
  std::vector<std::string> utterance_ids;
  double start_s = 0.0;  // start of the first utterance
  double end_s = 0.0;    // end of the last utterance
  // Sum of utterance durations; silence between utterances is not counted.
  double duration_s = 0.0;
  std::string transcript;
};

using SpanManifest = std::vector<Span>;

inline constexpr double kDefaultTargetSeconds = 240.0;

// Greedy left-to-right packing inside each chapter: the current span absorbs
// the next utterance while the summed duration stays <= target_s and the
// speaker is unchanged. Utterances are never split, so a single utterance
// longer than target_s forms its own span. Chapters keep their order of first
// appearance and may be processed on up to `jobs` threads.
SpanManifest agglomerate(const UtteranceManifest& manifest,
                         double target_s = kDefaultTargetSeconds, int jobs = 1);

// Each span as one utterance record covering [start_s, start_s + duration_s).
UtteranceManifest spans_as_manifest(const SpanManifest& spans);

void write_spans_jsonl(std::ostream& out, const SpanManifest& spans);
SpanManifest read_spans_jsonl(std::istream& in);

struct SplitStats {
  double hours = 0.0;
  std::size_t examples = 0;
  double mean_duration_s = 0.0;
  std::size_t chapters = 0;
  std::size_t speakers = 0;
};

SplitStats split_stats(const SpanManifest& spans);

// Subset | # Hours | # Examples | Avg. Dur. (s) | # Chapters | # Spkrs
std::string format_stats_table(
    const std::vector<std::pair<std::string, SplitStats>>& rows);

struct EvalPair {
  std::string span_id;
  std::string chapter_id;
  std::string speaker_id;
  // Offsets in seconds into the span's concatenated utterance audio.
  double prompt_start_s = 0.0;
  double prompt_end_s = 0.0;
  double reference_start_s = 0.0;
  double reference_end_s = 0.0;
  std::string transcript;
};

// Keeps spans of at least min_duration_s. The prompt is the first prompt_s
// seconds rounded to whole frames; the reference is the remainder.
// Throws InvalidArgument unless 0 < prompt_s < min_duration_s.
std::vector<EvalPair> make_eval_pairs(const SpanManifest& spans,
                                      double prompt_s, double min_duration_s,
                                      double frame_rate_hz = 25.0);

void to_json(nlohmann::json& j, const UtteranceRecord& record);
void from_json(const nlohmann::json& j, UtteranceRecord& record);
void to_json(nlohmann::json& j, const Span& span);
void from_json(const nlohmann::json& j, Span& span);
void to_json(nlohmann::json& j, const SplitStats& stats);
void to_json(nlohmann::json& j, const EvalPair& pair);

}  // namespace longgen::dataset
