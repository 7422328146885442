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

#include "longgen/decoder/sampling.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "longgen/core/errors.h"

namespace longgen::decoder {

void SamplingOptions::validate() const {
  if (!greedy && !(temperature > 0.0 && std::isfinite(temperature))) {
    throw InvalidArgument(
        "temperature must be positive; use greedy decoding instead of 0");
  }
  if (top_k < 0) throw InvalidArgument("top_k must be >= 0");
}

double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<double> softmax_probabilities(const Logits& logits,
                                          double temperature) {
  const Eigen::Index n = logits.size();
  std::vector<double> p(static_cast<std::size_t>(n));
  double max_logit = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    max_logit = std::max(max_logit, static_cast<double>(logits(i)));
  }
  if (!std::isfinite(max_logit)) {
    throw NumericInputError("logits have no finite maximum");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double z = (static_cast<double>(logits(i)) - max_logit) / temperature;
    p[static_cast<std::size_t>(i)] = std::exp(z);
    total += p[static_cast<std::size_t>(i)];
  }
  for (double& v : p) v /= total;
  return p;
}

TokenId sample_token(const Logits& logits, const SamplingOptions& options,
                     std::mt19937_64& rng) {
  options.validate();
  if (logits.size() == 0) throw InvalidArgument("empty logits");
  if (options.greedy) {
    Eigen::Index best = 0;
    logits.maxCoeff(&best);
    return static_cast<TokenId>(best);
  }
  Logits masked = logits;
  if (options.top_k > 0 && options.top_k < logits.size()) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(logits.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) {
                       return logits(a) > logits(b);
                     });
    for (std::size_t i = static_cast<std::size_t>(options.top_k);
         i < order.size(); ++i) {
      masked(order[i]) = -std::numeric_limits<float>::infinity();
    }
  }
  const std::vector<double> p =
      softmax_probabilities(masked, options.temperature);
  const double u = uniform_unit(rng);
  double cumulative = 0.0;
  TokenId last_positive = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    last_positive = static_cast<TokenId>(i);
    cumulative += p[i];
    if (u < cumulative) return static_cast<TokenId>(i);
  }
  // Rounding left the cumulative sum just below u.
  return last_positive;
}

DecoderSession::DecoderSession(const SequenceModel& model,
                               SamplingOptions options, std::uint64_t seed)
    : model_(&model),
      options_(options),
      rng_(seed),
      state_(model.init_state()) {
  options_.validate();
}

void DecoderSession::feed(TokenId token) {
  next_logits_ = model_->step(token, *state_);
}

void DecoderSession::feed(const std::vector<TokenId>& tokens) {
  for (TokenId t : tokens) feed(t);
}

TokenId DecoderSession::emit() {
  const Logits& logits = next_logits_ ? *next_logits_ : model_->prior_logits();
  const TokenId token = sample_token(logits, options_, rng_);
  feed(token);
  return token;
}

TokenStream sample_continuation(const SequenceModel& model,
                                const TokenStream& prompt,
                                std::int64_t length,
                                const SamplingOptions& options,
                                std::uint64_t seed) {
  if (length < 0) throw InvalidArgument("length must be >= 0");
  options.validate();
  prompt.validate(model.vocab_size());
  TokenStream out;
  out.frame_rate_hz = prompt.frame_rate_hz;
  out.ids.reserve(static_cast<std::size_t>(length));
  if (length == 0) return out;
  DecoderSession session(model, options, seed);
  session.feed(prompt.ids);
  for (std::int64_t i = 0; i < length; ++i) out.ids.push_back(session.emit());
  return out;
}

}  // namespace longgen::decoder
