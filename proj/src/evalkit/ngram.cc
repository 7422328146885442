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

#include "longgen/evalkit/ngram.h"

#include <cmath>

#include "longgen/core/errors.h"
#include "longgen/evalkit/text.h"

namespace longgen::evalkit {
namespace {

constexpr std::int32_t kUnknown = -1;
constexpr std::int32_t kBoundary = -2;

}  // namespace

NgramModel::NgramModel(const std::vector<std::string>& corpus, int order,
                       double alpha)
    : order_(order), alpha_(alpha) {
  if (order < 1) throw InvalidArgument("n-gram order must be >= 1");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("smoothing alpha must be finite and >= 0");
  }
  std::size_t words = 0;
  for (const std::string& doc : corpus) {
    for (const std::string& w : split_words(ascii_lower(doc))) {
      vocab_.emplace(w, static_cast<std::int32_t>(vocab_.size()));
      ++words;
    }
  }
  if (words == 0) throw InvalidArgument("n-gram training corpus is empty");
  const auto n = static_cast<std::size_t>(order);
  for (const std::string& doc : corpus) {
    const std::vector<std::int32_t> ids = padded_ids(doc);
    for (std::size_t i = n - 1; i < ids.size(); ++i) {
      const std::vector<std::int32_t> gram(ids.begin() + (i + 1 - n),
                                           ids.begin() + (i + 1));
      ++ngram_counts_[gram];
      ++history_counts_[{gram.begin(), gram.end() - 1}];
    }
  }
}

std::int32_t NgramModel::id_of(const std::string& word) const {
  const auto it = vocab_.find(word);
  return it == vocab_.end() ? kUnknown : it->second;
}

std::vector<std::int32_t> NgramModel::padded_ids(std::string_view text) const {
  std::vector<std::int32_t> ids(static_cast<std::size_t>(order_ - 1),
                                kBoundary);
  for (const std::string& w : split_words(ascii_lower(text))) {
    ids.push_back(id_of(w));
  }
  return ids;
}

double NgramModel::log_prob(const std::vector<std::int32_t>& history,
                            std::int32_t word) const {
  std::vector<std::int32_t> gram = history;
  gram.push_back(word);
  const auto joint = ngram_counts_.find(gram);
  const auto ctx = history_counts_.find(history);
  const double c_joint = joint == ngram_counts_.end()
                             ? 0.0
                             : static_cast<double>(joint->second);
  const double c_ctx =
      ctx == history_counts_.end() ? 0.0 : static_cast<double>(ctx->second);
  const double v = static_cast<double>(vocabulary_size());
  return std::log(c_joint + alpha_) - std::log(c_ctx + alpha_ * v);
}

double NgramModel::log_perplexity(std::string_view text) const {
  const std::vector<std::int32_t> ids = padded_ids(text);
  const auto n = static_cast<std::size_t>(order_);
  if (ids.size() < n) throw InvalidArgument("cannot score text without words");
  double total = 0.0;
  for (std::size_t i = n - 1; i < ids.size(); ++i) {
    total += log_prob({ids.begin() + (i + 1 - n), ids.begin() + i}, ids[i]);
  }
  return -total / static_cast<double>(ids.size() + 1 - n);
}

double ngram_ppl(std::string_view text, int order,
                 const std::vector<std::string>& corpus, double alpha) {
  return NgramModel(corpus, order, alpha).log_perplexity(text);
}

}  // namespace longgen::evalkit
