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

#include <utility>
#include <vector>

#include "longgen/core/types.h"
#include "longgen/decoder/sequence_model.h"

namespace longgen::decoder {

// log softmax(logits)[token], in double precision.
double log_probability(const Logits& logits, TokenId token);

// Sum over positions of log P(token_t | tokens_<t). The first token is scored
// against the model prior.
double score_loglikelihood(const SequenceModel& model,
                           const TokenStream& tokens);

struct ContrastivePair {
  TokenStream positive;
  TokenStream negative;
};

// Fraction of pairs whose positive scores strictly higher; exact ties count
// one half.
double contrastive_accuracy(const SequenceModel& model,
                            const std::vector<ContrastivePair>& pairs);

}  // namespace longgen::decoder
