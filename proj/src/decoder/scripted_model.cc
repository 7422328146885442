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

#include "longgen/decoder/scripted_model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "longgen/core/errors.h"

namespace longgen::decoder {
namespace {

class ScriptedState final : public DecodeState {
 public:
  std::unique_ptr<DecodeState> clone() const override {
    return std::make_unique<ScriptedState>(*this);
  }
  std::size_t bytes() const override { return sizeof(TokenId); }

  TokenId last = -1;
};

std::vector<double> normalized(std::vector<double> row, const char* what) {
  double total = 0.0;
  for (double p : row) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw InvalidArgument(std::string(what) +
                            " probabilities must be finite and >= 0");
    }
    total += p;
  }
  if (!(total > 0.0)) {
    throw InvalidArgument(std::string(what) + " row has no probability mass");
  }
  for (double& p : row) p /= total;
  return row;
}

Logits log_row(const std::vector<double>& row) {
  Logits out(static_cast<Eigen::Index>(row.size()));
  for (std::size_t i = 0; i < row.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) =
        row[i] > 0.0 ? static_cast<float>(std::log(row[i]))
                     : -std::numeric_limits<float>::infinity();
  }
  return out;
}

}  // namespace

ScriptedModel::ScriptedModel(std::vector<std::vector<double>> transitions,
                             std::vector<double> start) {
  const std::size_t vocab = transitions.size();
  if (vocab == 0) throw InvalidArgument("scripted model needs a vocabulary");
  if (start.size() != vocab) {
    throw InvalidArgument("start distribution must cover the vocabulary");
  }
  for (auto& row : transitions) {
    if (row.size() != vocab) {
      throw InvalidArgument("transition table must be square");
    }
    row = normalized(std::move(row), "transition");
    logits_.push_back(log_row(row));
  }
  transitions_ = std::move(transitions);
  start_logits_ = log_row(normalized(std::move(start), "start"));
}

ScriptedModel ScriptedModel::deterministic(const std::vector<TokenId>& next,
                                           TokenId start) {
  const std::size_t vocab = next.size();
  std::vector<std::vector<double>> table(vocab, std::vector<double>(vocab));
  for (std::size_t v = 0; v < vocab; ++v) {
    if (next[v] < 0 || static_cast<std::size_t>(next[v]) >= vocab) {
      throw InvalidArgument("successor outside the vocabulary");
    }
    table[v][static_cast<std::size_t>(next[v])] = 1.0;
  }
  if (start < 0 || static_cast<std::size_t>(start) >= vocab) {
    throw InvalidArgument("start token outside the vocabulary");
  }
  std::vector<double> first(vocab, 0.0);
  first[static_cast<std::size_t>(start)] = 1.0;
  return ScriptedModel(std::move(table), std::move(first));
}

ScriptedModel ScriptedModel::uniform(int vocab_size) {
  const auto v = static_cast<std::size_t>(vocab_size);
  return ScriptedModel(
      std::vector<std::vector<double>>(v, std::vector<double>(v, 1.0)),
      std::vector<double>(v, 1.0));
}

ScriptedModel ScriptedModel::random_sparse(int vocab_size, int branching,
                                           std::uint64_t seed) {
  if (vocab_size < 1 || branching < 1 || branching > vocab_size) {
    throw InvalidArgument("branching must be in [1, vocab_size]");
  }
  const auto v = static_cast<std::size_t>(vocab_size);
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> table(v, std::vector<double>(v, 0.0));
  std::vector<TokenId> ids(v);
  std::iota(ids.begin(), ids.end(), 0);
  std::uniform_real_distribution<double> weight(0.1, 1.0);
  for (auto& row : table) {
    std::shuffle(ids.begin(), ids.end(), rng);
    for (int k = 0; k < branching; ++k) {
      row[static_cast<std::size_t>(ids[static_cast<std::size_t>(k)])] =
          weight(rng);
    }
  }
  return ScriptedModel(std::move(table), std::vector<double>(v, 1.0));
}

ScriptedModel ScriptedModel::from_json(const nlohmann::json& spec) {
  try {
    if (spec.contains("next")) {
      return deterministic(spec.at("next").get<std::vector<TokenId>>(),
                           spec.value("start", 0));
    }
    if (spec.contains("transitions")) {
      auto table =
          spec.at("transitions").get<std::vector<std::vector<double>>>();
      std::vector<double> start =
          spec.contains("start_probs")
              ? spec.at("start_probs").get<std::vector<double>>()
              : std::vector<double>(table.size(), 1.0);
      return ScriptedModel(std::move(table), std::move(start));
    }
    return random_sparse(spec.at("vocab_size").get<int>(),
                         spec.value("branching", 2),
                         spec.value("seed", std::uint64_t{0}));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed scripted model spec: ") +
                          e.what());
  }
}

std::unique_ptr<DecodeState> ScriptedModel::init_state() const {
  return std::make_unique<ScriptedState>();
}

Eigen::MatrixXf ScriptedModel::step_batch(
    std::span<const TokenId> tokens,
    std::span<DecodeState* const> states) const {
  if (tokens.size() != states.size()) {
    throw InvalidArgument("one decode state per token required");
  }
  Eigen::MatrixXf out(vocab_size(), static_cast<Eigen::Index>(tokens.size()));
  for (std::size_t l = 0; l < tokens.size(); ++l) {
    auto* state = dynamic_cast<ScriptedState*>(states[l]);
    if (state == nullptr) {
      throw InvalidArgument("decode state was not created by this model");
    }
    if (tokens[l] < 0 || tokens[l] >= vocab_size()) {
      throw InvalidArgument("token id " + std::to_string(tokens[l]) +
                            " outside vocabulary");
    }
    state->last = tokens[l];
    ++state->position;
    out.col(static_cast<Eigen::Index>(l)) =
        logits_[static_cast<std::size_t>(tokens[l])];
  }
  return out;
}

std::size_t ScriptedModel::state_bytes_at(std::int64_t) const {
  return sizeof(TokenId);
}

std::unique_ptr<DecodeState> ScriptedModel::synthetic_state(
    std::int64_t position, std::uint64_t seed) const {
  auto state = std::make_unique<ScriptedState>();
  state->position = position;
  state->last = position > 0
                    ? static_cast<TokenId>(seed % static_cast<std::uint64_t>(
                                                      vocab_size()))
                    : -1;
  return state;
}

TokenId ScriptedModel::greedy_next(TokenId from) const {
  const auto& row = transitions_.at(static_cast<std::size_t>(from));
  return static_cast<TokenId>(std::max_element(row.begin(), row.end()) -
                              row.begin());
}

}  // namespace longgen::decoder
