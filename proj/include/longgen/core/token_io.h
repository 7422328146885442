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
#include <iosfwd>
#include <string>
#include <vector>

#include "longgen/core/types.h"

namespace longgen {

// Binary token files: a 16-byte header followed by u32 little-endian ids.
//
//   bytes 0-3   magic "TOKS"
//   bytes 4-7   u32 format version (1)
//   bytes 8-11  u32 vocab_size
//   bytes 12-13 u16 frame rate numerator
//   bytes 14-15 u16 frame rate denominator
inline constexpr std::uint32_t kTokenFileVersion = 1;

struct BinaryTokenFile {
  TokenStream stream;
  std::uint32_t vocab_size = 0;
};

void write_binary_tokens(std::ostream& out, const TokenStream& stream,
                         std::uint32_t vocab_size);
BinaryTokenFile read_binary_tokens(std::istream& in);

// JSON-lines: one record per stream, {"ids": [...], "frame_rate_hz": r}.
std::string token_stream_to_jsonl(const TokenStream& stream);
std::vector<TokenStream> read_jsonl_tokens(std::istream& in);

// Reads a token file by sniffing the magic; JSON-lines files yield the first
// record.
TokenStream read_token_file(const std::string& path);
// Chooses JSON-lines for ".jsonl"/".json" extensions, binary otherwise.
void write_token_file(const std::string& path, const TokenStream& stream,
                      std::uint32_t vocab_size);

// Best rational approximation num/den of a frame rate with both fitting u16.
std::pair<std::uint16_t, std::uint16_t> frame_rate_fraction(double rate_hz);

}  // namespace longgen
