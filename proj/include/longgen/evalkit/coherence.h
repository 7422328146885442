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
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace longgen::evalkit {

// Maps text to a unit-norm vector of fixed dimension. Implementations must be
// deterministic and safe to call concurrently.
class TextEmbedder {
 public:
  virtual ~TextEmbedder() = default;
  virtual int dimension() const = 0;
  // Throws InvalidArgument on text without words.
  virtual Eigen::VectorXd embed(std::string_view text) const = 0;
};

// Bag of character trigrams. Each lowercased word is wrapped as "^word$" and
// every trigram of the wrapped word adds one count to bucket
// fnv1a(trigram) mod dimension. The count vector is L2-normalized.
class HashedTrigramEmbedder final : public TextEmbedder {
 public:
  static constexpr int kDimension = 256;
  static constexpr std::uint64_t kHashSeed = 0x5ca1ab1e0ddba11ULL;

  int dimension() const override { return kDimension; }
  Eigen::VectorXd embed(std::string_view text) const override;

  // Buckets touched by `text`; two texts with disjoint bucket sets have
  // cosine similarity exactly 0.
  static std::vector<int> buckets(std::string_view text);
};

double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct ScLPoint {
  std::size_t start_word = 0;
  double score = 0.0;
};

struct ScLSeries {
  Eigen::VectorXd prompt_embedding;
  std::vector<ScLPoint> points;
};

inline constexpr std::size_t kScLSegmentWords = 100;

// Cosine similarity between the prompt embedding and every full 100-word
// segment of the continuation; a trailing partial segment is dropped.
ScLSeries sc_l(std::string_view prompt_text, std::string_view continuation_text,
               const TextEmbedder& embedder);

// Cosine similarity of whole-text embeddings.
double reference_similarity(std::string_view generated_text,
                            std::string_view reference_text,
                            const TextEmbedder& embedder);

struct TimeSpan {
  double start_s = 0.0;
  double end_s = 0.0;
  bool operator==(const TimeSpan&) const = default;
};

// [prompt, 60), [60, 120), [120, 180), [180, max), keeping non-empty spans.
// Throws InvalidArgument unless prompt_s < 60 < max_s.
std::vector<TimeSpan> time_strata(double prompt_s, double max_s);

// One probe of probe_s seconds per stratum, placed uniformly at random inside
// it; a stratum shorter than the probe is returned whole. Deterministic in
// seed.
std::vector<TimeSpan> sample_stratum_probes(const std::vector<TimeSpan>& strata,
                                            double probe_s,
                                            std::uint64_t seed);

void to_json(nlohmann::json& j, const ScLSeries& series);
void to_json(nlohmann::json& j, const TimeSpan& span);

}  // namespace longgen::evalkit
