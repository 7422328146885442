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

#include "longgen/decoder/scoring.h"

#include <cmath>
#include <limits>

#include "longgen/core/errors.h"

namespace longgen::decoder {

double log_probability(const Logits& logits, TokenId token) {
  if (token < 0 || token >= logits.size()) {
    throw InvalidArgument("token outside the logits vocabulary");
  }
  double max_logit = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    max_logit = std::max(max_logit, static_cast<double>(logits(i)));
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    total += std::exp(static_cast<double>(logits(i)) - max_logit);
  }
  return static_cast<double>(logits(token)) - max_logit - std::log(total);
}

double score_loglikelihood(const SequenceModel& model,
                           const TokenStream& tokens) {
  if (tokens.empty()) throw InvalidArgument("cannot score an empty stream");
  tokens.validate(model.vocab_size());
  auto state = model.init_state();
  double total = log_probability(model.prior_logits(), tokens.ids.front());
  for (std::size_t t = 0; t + 1 < tokens.size(); ++t) {
    total += log_probability(model.step(tokens.ids[t], *state),
                             tokens.ids[t + 1]);
  }
  return total;
}

double contrastive_accuracy(const SequenceModel& model,
                            const std::vector<ContrastivePair>& pairs) {
  if (pairs.empty()) throw InvalidArgument("no contrastive pairs given");
  double credit = 0.0;
  for (const auto& pair : pairs) {
    if (pair.positive.empty() || pair.negative.empty()) {
      throw InvalidArgument("contrastive pair members must be non-empty");
    }
    const double pos = score_loglikelihood(model, pair.positive);
    const double neg = score_loglikelihood(model, pair.negative);
    if (pos > neg) {
      credit += 1.0;
    } else if (pos == neg) {
      credit += 0.5;
    }
  }
  return credit / static_cast<double>(pairs.size());
}

}  // namespace longgen::decoder
