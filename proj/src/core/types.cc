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

#include "longgen/core/types.h"

#include <cmath>
#include <string>

#include "longgen/core/errors.h"

namespace longgen {

void TokenStream::validate(int vocab_size) const {
  if (!(frame_rate_hz > 0.0) || !std::isfinite(frame_rate_hz)) {
    throw InvalidArgument("token stream frame rate must be positive, got " +
                          std::to_string(frame_rate_hz));
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= vocab_size) {
      throw InvalidArgument("token id " + std::to_string(ids[i]) +
                            " at position " + std::to_string(i) +
                            " outside vocabulary of size " +
                            std::to_string(vocab_size));
    }
  }
}

std::int64_t duration_to_tokens(double seconds, double frame_rate_hz) {
  if (!(seconds >= 0.0) || !std::isfinite(seconds)) {
    throw InvalidArgument("duration must be a non-negative number of seconds");
  }
  if (!(frame_rate_hz > 0.0) || !std::isfinite(frame_rate_hz)) {
    throw InvalidArgument("frame rate must be positive");
  }
  return static_cast<std::int64_t>(std::floor(seconds * frame_rate_hz + 0.5));
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  // splitmix64 finalizer over the combined value.
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace longgen
