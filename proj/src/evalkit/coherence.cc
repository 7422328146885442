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

#include "longgen/evalkit/coherence.h"

#include <algorithm>
#include <random>

#include "longgen/core/errors.h"
#include "longgen/core/types.h"
#include "longgen/evalkit/text.h"

namespace longgen::evalkit {
namespace {

template <typename Visit>
void for_each_trigram(std::string_view text, Visit&& visit) {
  for (const std::string& word : split_words(text)) {
    const std::string wrapped = "^" + ascii_lower(word) + "$";
    for (std::size_t i = 0; i + 3 <= wrapped.size(); ++i) {
      visit(std::string_view(wrapped).substr(i, 3));
    }
  }
}

int bucket_of(std::string_view trigram) {
  return static_cast<int>(
      fnv1a64(trigram, kFnvOffsetBasis ^ HashedTrigramEmbedder::kHashSeed) %
      HashedTrigramEmbedder::kDimension);
}

}  // namespace

Eigen::VectorXd HashedTrigramEmbedder::embed(std::string_view text) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(kDimension);
  for_each_trigram(text, [&](std::string_view t) { v(bucket_of(t)) += 1.0; });
  const double norm = v.norm();
  if (norm == 0.0) throw InvalidArgument("cannot embed text without words");
  return v / norm;
}

std::vector<int> HashedTrigramEmbedder::buckets(std::string_view text) {
  std::vector<int> out;
  for_each_trigram(text, [&](std::string_view t) { out.push_back(bucket_of(t)); });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("embedding dimensions differ");
  }
  const double denom = a.norm() * b.norm();
  if (denom == 0.0) throw InvalidArgument("cosine of a zero vector");
  return std::clamp(a.dot(b) / denom, -1.0, 1.0);
}

ScLSeries sc_l(std::string_view prompt_text, std::string_view continuation_text,
               const TextEmbedder& embedder) {
  if (split_words(prompt_text).empty()) {
    throw InvalidArgument("SC-L needs a non-empty prompt");
  }
  ScLSeries series;
  series.prompt_embedding = embedder.embed(prompt_text);
  const std::vector<std::string> words = split_words(continuation_text);
  for (std::size_t start = 0; start + kScLSegmentWords <= words.size();
       start += kScLSegmentWords) {
    const Eigen::VectorXd segment =
        embedder.embed(join_words(words, start, start + kScLSegmentWords));
    series.points.push_back(
        {start, cosine_similarity(series.prompt_embedding, segment)});
  }
  return series;
}

double reference_similarity(std::string_view generated_text,
                            std::string_view reference_text,
                            const TextEmbedder& embedder) {
  if (split_words(generated_text).empty() ||
      split_words(reference_text).empty()) {
    throw InvalidArgument("reference similarity needs two non-empty texts");
  }
  return cosine_similarity(embedder.embed(generated_text),
                           embedder.embed(reference_text));
}

std::vector<TimeSpan> time_strata(double prompt_s, double max_s) {
  if (!(prompt_s >= 0.0 && prompt_s < 60.0 && max_s > 60.0)) {
    throw InvalidArgument("time strata need 0 <= prompt < 60 < max");
  }
  const double edges[] = {prompt_s, 60.0, 120.0, 180.0};
  std::vector<TimeSpan> spans;
  for (std::size_t i = 0; i < 4; ++i) {
    const double end = i + 1 < 4 ? std::min(edges[i + 1], max_s) : max_s;
    if (end > edges[i]) spans.push_back({edges[i], end});
  }
  return spans;
}

std::vector<TimeSpan> sample_stratum_probes(const std::vector<TimeSpan>& strata,
                                            double probe_s,
                                            std::uint64_t seed) {
  if (!(probe_s > 0.0)) throw InvalidArgument("probe length must be positive");
  std::vector<TimeSpan> probes;
  for (std::size_t i = 0; i < strata.size(); ++i) {
    const TimeSpan& s = strata[i];
    const double slack = s.end_s - s.start_s - probe_s;
    if (slack <= 0.0) {
      probes.push_back(s);
      continue;
    }
    std::mt19937_64 rng(derive_seed(seed, i));
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const double start = s.start_s + u * slack;
    probes.push_back({start, start + probe_s});
  }
  return probes;
}

void to_json(nlohmann::json& j, const ScLSeries& series) {
  nlohmann::json points = nlohmann::json::array();
  for (const ScLPoint& p : series.points) {
    points.push_back({{"start_word", p.start_word}, {"score", p.score}});
  }
  j = {{"segment_words", kScLSegmentWords}, {"points", points}};
}

void to_json(nlohmann::json& j, const TimeSpan& span) {
  j = nlohmann::json::array({span.start_s, span.end_s});
}

}  // namespace longgen::evalkit
