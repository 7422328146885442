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

#include "longgen/core/token_io.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "longgen/core/byte_order.h"
#include "longgen/core/errors.h"
#include "longgen/core/file_io.h"

namespace longgen {
namespace {

constexpr char kMagic[4] = {'T', 'O', 'K', 'S'};

}  // namespace

std::pair<std::uint16_t, std::uint16_t> frame_rate_fraction(double rate_hz) {
  if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) {
    throw InvalidArgument("frame rate must be positive");
  }
  std::uint16_t best_num = 0, best_den = 1;
  double best_err = INFINITY;
  for (std::uint32_t den = 1; den <= 1000; ++den) {
    const double num = std::round(rate_hz * den);
    if (num < 1.0 || num > 65535.0) continue;
    const double err = std::abs(num / den - rate_hz);
    if (err < best_err) {
      best_err = err;
      best_num = static_cast<std::uint16_t>(num);
      best_den = static_cast<std::uint16_t>(den);
      if (err == 0.0) break;
    }
  }
  if (best_num == 0) {
    throw InvalidArgument("frame rate not representable in a token file");
  }
  return {best_num, best_den};
}

void write_binary_tokens(std::ostream& out, const TokenStream& stream,
                         std::uint32_t vocab_size) {
  stream.validate(static_cast<int>(vocab_size));
  const auto [num, den] = frame_rate_fraction(stream.frame_rate_hz);
  unsigned char header[16];
  std::memcpy(header, kMagic, 4);
  detail::store_le<std::uint32_t>(header + 4, kTokenFileVersion);
  detail::store_le<std::uint32_t>(header + 8, vocab_size);
  detail::store_le<std::uint16_t>(header + 12, num);
  detail::store_le<std::uint16_t>(header + 14, den);
  out.write(reinterpret_cast<const char*>(header), 16);
  std::vector<unsigned char> body(stream.ids.size() * 4);
  for (std::size_t i = 0; i < stream.ids.size(); ++i) {
    detail::store_le<std::uint32_t>(body.data() + 4 * i,
                                    static_cast<std::uint32_t>(stream.ids[i]));
  }
  out.write(reinterpret_cast<const char*>(body.data()),
            static_cast<std::streamsize>(body.size()));
  if (!out) throw IoError("failed to write token file");
}

BinaryTokenFile read_binary_tokens(std::istream& in) {
  unsigned char header[16];
  if (!in.read(reinterpret_cast<char*>(header), 16)) {
    throw InvalidArgument("token file shorter than its 16-byte header");
  }
  if (std::memcmp(header, kMagic, 4) != 0) {
    throw InvalidArgument("token file has bad magic");
  }
  if (detail::load_le<std::uint32_t>(header + 4) != kTokenFileVersion) {
    throw InvalidArgument("unsupported token file version");
  }
  BinaryTokenFile file;
  file.vocab_size = detail::load_le<std::uint32_t>(header + 8);
  const auto num = detail::load_le<std::uint16_t>(header + 12);
  const auto den = detail::load_le<std::uint16_t>(header + 14);
  if (num == 0 || den == 0) {
    throw InvalidArgument("token file frame rate must be positive");
  }
  file.stream.frame_rate_hz = static_cast<double>(num) / den;
  std::vector<unsigned char> body((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (body.size() % 4 != 0) {
    throw InvalidArgument("token file body is not a whole number of ids");
  }
  file.stream.ids.resize(body.size() / 4);
  for (std::size_t i = 0; i < file.stream.ids.size(); ++i) {
    file.stream.ids[i] = static_cast<TokenId>(
        detail::load_le<std::uint32_t>(body.data() + 4 * i));
  }
  file.stream.validate(static_cast<int>(file.vocab_size));
  return file;
}

std::string token_stream_to_jsonl(const TokenStream& stream) {
  nlohmann::json j{{"ids", stream.ids},
                   {"frame_rate_hz", stream.frame_rate_hz}};
  return j.dump() + "\n";
}

std::vector<TokenStream> read_jsonl_tokens(std::istream& in) {
  std::vector<TokenStream> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      TokenStream s;
      s.ids = j.at("ids").get<std::vector<TokenId>>();
      s.frame_rate_hz = j.value("frame_rate_hz", kDefaultFrameRateHz);
      out.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument("token JSON-lines record " +
                            std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

TokenStream read_token_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open token file '" + path + "'");
  char magic[4] = {};
  in.read(magic, 4);
  const bool binary = in.gcount() == 4 && std::memcmp(magic, kMagic, 4) == 0;
  in.clear();
  in.seekg(0);
  if (binary) return read_binary_tokens(in).stream;
  auto records = read_jsonl_tokens(in);
  if (records.empty()) {
    throw InvalidArgument("token file '" + path + "' holds no records");
  }
  return std::move(records.front());
}

void write_token_file(const std::string& path, const TokenStream& stream,
                      std::uint32_t vocab_size) {
  std::ostringstream out(std::ios::binary);
  if (has_extension(path, ".jsonl") || has_extension(path, ".json")) {
    stream.validate(static_cast<int>(vocab_size));
    out << token_stream_to_jsonl(stream);
  } else {
    write_binary_tokens(out, stream, vocab_size);
  }
  write_file_atomic(path, out.str());
}

}  // namespace longgen
