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

#include "longgen/dataset/dataset.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <unordered_map>

#include "longgen/core/errors.h"
#include "longgen/core/types.h"

namespace longgen::dataset {
namespace {

// Summed durations compare against the target with this slack so that
// decimal inputs like 80 + 80 + 80 <= 240 behave as written.
constexpr double kDurationEpsilon = 1e-9;

std::vector<std::vector<std::size_t>> group_by_chapter(
    const UtteranceManifest& manifest) {
  std::vector<std::vector<std::size_t>> groups;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const auto [it, inserted] =
        index.emplace(manifest[i].chapter_id, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(i);
  }
  return groups;
}

std::vector<std::string> parse_csv_row(const std::string& line,
                                       std::size_t line_no) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  if (quoted) {
    throw ManifestError("unterminated quote on CSV line " +
                        std::to_string(line_no));
  }
  return fields;
}

std::vector<Span> pack_chapter(const UtteranceManifest& manifest,
                               const std::vector<std::size_t>& rows,
                               double target_s) {
  std::vector<Span> spans;
  for (std::size_t row : rows) {
    const UtteranceRecord& u = manifest[row];
    const bool extend =
        !spans.empty() && spans.back().speaker_id == u.speaker_id &&
        spans.back().duration_s + u.duration_s() <=
            target_s + kDurationEpsilon;
    if (!extend) {
      Span s;
      s.span_id = u.chapter_id + "_" + std::to_string(spans.size());
      s.chapter_id = u.chapter_id;
      s.speaker_id = u.speaker_id;
      s.start_s = u.start_s;
      spans.push_back(std::move(s));
    }
    Span& s = spans.back();
    s.utterance_ids.push_back(u.utterance_id);
    s.end_s = u.end_s;
    s.duration_s += u.duration_s();
    if (!u.transcript.empty()) {
      if (!s.transcript.empty()) s.transcript += ' ';
      s.transcript += u.transcript;
    }
  }
  return spans;
}

}  // namespace

void validate_manifest(const UtteranceManifest& manifest) {
  std::set<std::string> ids;
  for (const UtteranceRecord& r : manifest) {
    if (r.utterance_id.empty() || r.chapter_id.empty()) {
      throw ManifestError("records need utterance and chapter ids");
    }
    if (!ids.insert(r.utterance_id).second) {
      throw ManifestError("duplicate utterance id '" + r.utterance_id + "'");
    }
    if (!std::isfinite(r.start_s) || !std::isfinite(r.end_s) ||
        !(r.end_s > r.start_s) || r.start_s < 0.0) {
      throw ManifestError("utterance '" + r.utterance_id +
                          "' has an invalid time range");
    }
  }
  for (const auto& rows : group_by_chapter(manifest)) {
    for (std::size_t k = 1; k < rows.size(); ++k) {
      const UtteranceRecord& prev = manifest[rows[k - 1]];
      const UtteranceRecord& cur = manifest[rows[k]];
      if (cur.start_s < prev.start_s) {
        throw ManifestError("utterance '" + cur.utterance_id +
                            "' starts before its predecessor in chapter '" +
                            cur.chapter_id + "'");
      }
      if (cur.start_s < prev.end_s) {
        throw ManifestError("utterances '" + prev.utterance_id + "' and '" +
                            cur.utterance_id + "' overlap");
      }
    }
  }
}

UtteranceManifest read_manifest_jsonl(std::istream& in) {
  UtteranceManifest manifest;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      manifest.push_back(nlohmann::json::parse(line).get<UtteranceRecord>());
    } catch (const nlohmann::json::exception& e) {
      throw ManifestError("manifest line " + std::to_string(line_no) + ": " +
                          e.what());
    }
  }
  return manifest;
}

void write_manifest_jsonl(std::ostream& out,
                          const UtteranceManifest& manifest) {
  for (const UtteranceRecord& r : manifest) {
    out << nlohmann::json(r).dump() << '\n';
  }
}

UtteranceManifest read_manifest_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return {};
  const std::vector<std::string> header = parse_csv_row(line, 1);
  const char* kColumns[] = {"utterance_id", "chapter_id", "speaker_id",
                            "start_s",      "end_s",      "transcript"};
  std::map<std::string, std::size_t> column;
  for (const char* name : kColumns) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw ManifestError(std::string("CSV header lacks column '") + name +
                          "'");
    }
    column[name] = static_cast<std::size_t>(it - header.begin());
  }
  UtteranceManifest manifest;
  for (std::size_t line_no = 2; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> f = parse_csv_row(line, line_no);
    if (f.size() != header.size()) {
      throw ManifestError("CSV line " + std::to_string(line_no) + " has " +
                          std::to_string(f.size()) + " fields, expected " +
                          std::to_string(header.size()));
    }
    UtteranceRecord r;
    r.utterance_id = f[column["utterance_id"]];
    r.chapter_id = f[column["chapter_id"]];
    r.speaker_id = f[column["speaker_id"]];
    r.transcript = f[column["transcript"]];
    try {
      r.start_s = std::stod(f[column["start_s"]]);
      r.end_s = std::stod(f[column["end_s"]]);
    } catch (const std::exception&) {
      throw ManifestError("CSV line " + std::to_string(line_no) +
                          " has a non-numeric time");
    }
    manifest.push_back(std::move(r));
  }
  return manifest;
}

UtteranceManifest read_manifest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest '" + path + "'");
  const bool csv =
      path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  return csv ? read_manifest_csv(in) : read_manifest_jsonl(in);
}

SpanManifest agglomerate(const UtteranceManifest& manifest, double target_s,
                         int jobs) {
  if (!(target_s > 0.0)) throw InvalidArgument("target duration must be > 0");
  validate_manifest(manifest);
  const auto groups = group_by_chapter(manifest);
  std::vector<std::vector<Span>> per_chapter(groups.size());
  if (jobs <= 1 || groups.size() <= 1) {
    for (std::size_t g = 0; g < groups.size(); ++g) {
      per_chapter[g] = pack_chapter(manifest, groups[g], target_s);
    }
  } else {
    std::vector<std::future<std::vector<Span>>> pending;
    for (std::size_t first = 0; first < groups.size();
         first += static_cast<std::size_t>(jobs)) {
      const std::size_t last =
          std::min(groups.size(), first + static_cast<std::size_t>(jobs));
      pending.clear();
      for (std::size_t g = first; g < last; ++g) {
        pending.push_back(std::async(std::launch::async, pack_chapter,
                                     std::cref(manifest), std::cref(groups[g]),
                                     target_s));
      }
      for (std::size_t g = first; g < last; ++g) {
        per_chapter[g] = pending[g - first].get();
      }
    }
  }
  SpanManifest spans;
  for (auto& chapter : per_chapter) {
    std::move(chapter.begin(), chapter.end(), std::back_inserter(spans));
  }
  return spans;
}

UtteranceManifest spans_as_manifest(const SpanManifest& spans) {
  UtteranceManifest out;
  out.reserve(spans.size());
  for (const Span& s : spans) {
    out.push_back({s.span_id, s.chapter_id, s.speaker_id, s.start_s,
                   s.start_s + s.duration_s, s.transcript});
  }
  return out;
}

void write_spans_jsonl(std::ostream& out, const SpanManifest& spans) {
  for (const Span& s : spans) out << nlohmann::json(s).dump() << '\n';
}

SpanManifest read_spans_jsonl(std::istream& in) {
  SpanManifest spans;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      spans.push_back(nlohmann::json::parse(line).get<Span>());
    } catch (const nlohmann::json::exception& e) {
      throw ManifestError("span line " + std::to_string(line_no) + ": " +
                          e.what());
    }
  }
  return spans;
}

SplitStats split_stats(const SpanManifest& spans) {
  SplitStats stats;
  std::set<std::string> chapters;
  std::set<std::string> speakers;
  double total = 0.0;
  for (const Span& s : spans) {
    total += s.duration_s;
    chapters.insert(s.chapter_id);
    speakers.insert(s.speaker_id);
  }
  stats.examples = spans.size();
  stats.hours = total / 3600.0;
  stats.mean_duration_s =
      spans.empty() ? 0.0 : total / static_cast<double>(spans.size());
  stats.chapters = chapters.size();
  stats.speakers = speakers.size();
  return stats;
}

std::string format_stats_table(
    const std::vector<std::pair<std::string, SplitStats>>& rows) {
  std::size_t name_width = 6;
  for (const auto& [name, _] : rows) {
    name_width = std::max(name_width, name.size());
  }
  auto pad = [](std::string s, std::size_t w) {
    s.resize(std::max(w, s.size()), ' ');
    return s;
  };
  std::string out = pad("Subset", name_width) +
                    " | # Hours | # Examples | Avg. Dur. (s) | # Chapters | "
                    "# Spkrs\n";
  char line[160];
  for (const auto& [name, s] : rows) {
    std::snprintf(line, sizeof(line), " | %7.1f | %10zu | %13.1f | %10zu | %7zu\n",
                  s.hours, s.examples, s.mean_duration_s, s.chapters,
                  s.speakers);
    out += pad(name, name_width) + line;
  }
  return out;
}

std::vector<EvalPair> make_eval_pairs(const SpanManifest& spans,
                                      double prompt_s, double min_duration_s,
                                      double frame_rate_hz) {
  if (!(prompt_s > 0.0 && prompt_s < min_duration_s)) {
    throw InvalidArgument("need 0 < prompt_s < min_duration_s");
  }
  const double prompt_end =
      static_cast<double>(duration_to_tokens(prompt_s, frame_rate_hz)) /
      frame_rate_hz;
  std::vector<EvalPair> pairs;
  for (const Span& s : spans) {
    if (s.duration_s + kDurationEpsilon < min_duration_s) continue;
    pairs.push_back({s.span_id, s.chapter_id, s.speaker_id, 0.0, prompt_end,
                     prompt_end, s.duration_s, s.transcript});
  }
  return pairs;
}

void to_json(nlohmann::json& j, const UtteranceRecord& r) {
  j = {{"utterance_id", r.utterance_id}, {"chapter_id", r.chapter_id},
       {"speaker_id", r.speaker_id},     {"start_s", r.start_s},
       {"end_s", r.end_s},               {"transcript", r.transcript}};
}

void from_json(const nlohmann::json& j, UtteranceRecord& r) {
  // Ids may be written as numbers in hand-made manifests.
  auto id = [&](const char* key) {
    const auto& v = j.at(key);
    return v.is_string() ? v.get<std::string>() : v.dump();
  };
  r.utterance_id = id("utterance_id");
  r.chapter_id = id("chapter_id");
  r.speaker_id = id("speaker_id");
  r.start_s = j.at("start_s").get<double>();
  r.end_s = j.at("end_s").get<double>();
  r.transcript = j.value("transcript", std::string());
}

void to_json(nlohmann::json& j, const Span& s) {
  j = {{"span_id", s.span_id},
       {"chapter_id", s.chapter_id},
       {"speaker_id", s.speaker_id},
       {"utterance_ids", s.utterance_ids},
       {"start_s", s.start_s},
       {"end_s", s.end_s},
       {"duration_s", s.duration_s},
       {"transcript", s.transcript}};
}

void from_json(const nlohmann::json& j, Span& s) {
  s.span_id = j.at("span_id").get<std::string>();
  s.chapter_id = j.at("chapter_id").get<std::string>();
  s.speaker_id = j.at("speaker_id").get<std::string>();
  s.utterance_ids = j.at("utterance_ids").get<std::vector<std::string>>();
  s.start_s = j.value("start_s", 0.0);
  s.end_s = j.value("end_s", 0.0);
  s.duration_s = j.at("duration_s").get<double>();
  s.transcript = j.value("transcript", std::string());
}

void to_json(nlohmann::json& j, const SplitStats& s) {
  j = {{"hours", s.hours},
       {"examples", s.examples},
       {"mean_duration_s", s.mean_duration_s},
       {"chapters", s.chapters},
       {"speakers", s.speakers}};
}

void to_json(nlohmann::json& j, const EvalPair& p) {
  j = {{"span_id", p.span_id},
       {"chapter_id", p.chapter_id},
       {"speaker_id", p.speaker_id},
       {"prompt", {p.prompt_start_s, p.prompt_end_s}},
       {"reference", {p.reference_start_s, p.reference_end_s}},
       {"transcript", p.transcript}};
}

}  // namespace longgen::dataset
