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

#include "longgen/decoder/sequence_model.h"

namespace longgen::decoder {

Logits SequenceModel::step(TokenId token, DecodeState& state) const {
  const TokenId tokens[] = {token};
  DecodeState* states[] = {&state};
  return step_batch(tokens, states).col(0);
}

Logits SequenceModel::prior_logits() const {
  return Logits::Zero(vocab_size());
}

}  // namespace longgen::decoder
