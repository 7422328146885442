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
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace longgen::evalkit {

// Word n-gram model with additive smoothing:
//
//   P(w | h) = (c(h, w) + alpha) / (c(h) + alpha * V)
//
// over lowercased whitespace words. Every document is left-padded with
// order - 1 "<s>" markers; V counts the training words plus one unknown-word
// class that absorbs unseen words.
class NgramModel {
 public:
  NgramModel(const std::vector<std::string>& corpus, int order,
             double alpha = 1.0);

  int order() const { return order_; }
  double alpha() const { return alpha_; }
  std::size_t vocabulary_size() const { return vocab_.size() + 1; }

  // Natural-log probability of `word` after `history` (the order - 1
  // preceding ids).
  double log_prob(const std::vector<std::int32_t>& history,
                  std::int32_t word) const;

  // Mean negative log-probability per word of `text` (natural log). Throws
  // InvalidArgument on text without words.
  double log_perplexity(std::string_view text) const;

 private:
  std::int32_t id_of(const std::string& word) const;
  std::vector<std::int32_t> padded_ids(std::string_view text) const;

  int order_;
  double alpha_;
  std::unordered_map<std::string, std::int32_t> vocab_;
  std::map<std::vector<std::int32_t>, std::uint64_t> ngram_counts_;
  std::map<std::vector<std::int32_t>, std::uint64_t> history_counts_;
};

// Log-perplexity per word of `text` under an order-`order` model trained on
// `corpus`.
double ngram_ppl(std::string_view text, int order,
                 const std::vector<std::string>& corpus, double alpha = 1.0);

}  // namespace longgen::evalkit
