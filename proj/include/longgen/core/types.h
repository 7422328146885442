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
#include <string_view>
#include <vector>

namespace longgen {

using TokenId = std::int32_t;

inline constexpr double kDefaultFrameRateHz = 25.0;
inline constexpr int kDefaultVocabSize = 32768;

// A sequence of vocabulary ids emitted at a fixed frame rate.
struct TokenStream {
  std::vector<TokenId> ids;
  double frame_rate_hz = kDefaultFrameRateHz;

  std::size_t size() const { return ids.size(); }
  bool empty() const { return ids.empty(); }
  double duration_s() const {
    return static_cast<double>(ids.size()) / frame_rate_hz;
  }

  // Throws InvalidArgument if any id is outside [0, vocab_size) or the frame
  // rate is not positive.
  void validate(int vocab_size) const;
};

// Number of frames covering `seconds` at `frame_rate_hz`, rounded half up.
std::int64_t duration_to_tokens(double seconds,
                                double frame_rate_hz = kDefaultFrameRateHz);

// Derives an independent 64-bit seed from a base seed and a stream index.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;

// 64-bit FNV-1a over the bytes of `data`, starting from `basis`.
std::uint64_t fnv1a64(std::string_view data,
                      std::uint64_t basis = kFnvOffsetBasis);

}  // namespace longgen
