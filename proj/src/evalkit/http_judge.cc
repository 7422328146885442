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

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cstdlib>
#include <regex>

#include "longgen/core/errors.h"
#include "longgen/evalkit/judge.h"

namespace longgen::evalkit {

HttpJudge::HttpJudge(HttpJudgeConfig config) : config_(std::move(config)) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.endpoint, m, kUrl)) {
    throw InvalidArgument("judge endpoint must be an http(s) URL, got '" +
                          config_.endpoint + "'");
  }
  base_url_ = m[1];
  path_ = m[2].matched ? std::string(m[2]) : "/v1/chat/completions";
  if (config_.model.empty()) throw InvalidArgument("judge model name is empty");
}

std::string HttpJudge::complete(const std::string& prompt) const {
  httplib::Client client(base_url_);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);

  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str());
      key != nullptr && *key != '\0') {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  const nlohmann::json body = {
      {"model", config_.model},
      {"temperature", config_.temperature},
      {"messages", {{{"role", "user"}, {"content", prompt}}}}};
  const auto res =
      client.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    throw JudgeError("judge request to " + config_.endpoint +
                     " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw JudgeError("judge returned HTTP " + std::to_string(res->status));
  }
  try {
    const auto reply = nlohmann::json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content")
        .get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw JudgeError(std::string("malformed judge response: ") + e.what());
  }
}

}  // namespace longgen::evalkit
