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

#include "longgen/core/weights.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <random>
#include <set>
#include <sstream>

#include "longgen/core/byte_order.h"
#include "longgen/core/errors.h"
#include "longgen/core/file_io.h"

namespace longgen {
namespace {

constexpr const char* kFormatName = "longgen-weights";
constexpr int kFormatVersion = 1;

std::string shape_string(const std::vector<std::int64_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

std::int64_t shape_numel(const std::vector<std::int64_t>& shape) {
  std::int64_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

enum class InitRule { kZeros, kOnes, kNormalFanIn, kEmbedding, kDecay };

InitRule rule_for(const std::string& name) {
  auto ends_with = [&](std::string_view suffix) {
    return name.size() >= suffix.size() &&
           name.compare(name.size() - suffix.size(), suffix.size(), suffix) ==
               0;
  };
  if (name == "embedding") return InitRule::kEmbedding;
  if (ends_with(".scale")) return InitRule::kOnes;
  if (ends_with(".bias")) return InitRule::kZeros;
  if (ends_with(".decay")) return InitRule::kDecay;
  return InitRule::kNormalFanIn;
}

}  // namespace

std::int64_t Tensor::numel() const { return shape_numel(shape); }

bool Tensor::operator==(const Tensor& other) const {
  return shape == other.shape && data.size() == other.data.size() &&
         std::memcmp(data.data(), other.data.data(),
                     data.size() * sizeof(float)) == 0;
}

void ParameterSet::insert(std::string name, Tensor tensor) {
  tensors_.insert_or_assign(std::move(name), std::move(tensor));
}

const Tensor& ParameterSet::at(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) {
    throw SchemaError("missing tensor '" + name + "'");
  }
  return it->second;
}

bool ParameterSet::contains(const std::string& name) const {
  return tensors_.count(name) != 0;
}

std::size_t ParameterSet::total_bytes() const {
  std::size_t total = 0;
  for (const auto& [name, t] : tensors_) total += t.data.size() * sizeof(float);
  return total;
}

bool ParameterSet::operator==(const ParameterSet& other) const {
  return tensors_ == other.tensors_;
}

std::vector<TensorSpec> required_tensors(const ModelConfig& config) {
  config.validate();
  const std::int64_t d = config.model_dim;
  const std::int64_t r = config.effective_recurrence_dim();
  const std::int64_t qdim =
      static_cast<std::int64_t>(config.num_query_heads) * config.head_dim;
  const std::int64_t hd = config.head_dim;
  const std::int64_t f = config.mlp_hidden_dim();
  const std::int64_t w = config.conv_width;
  const int per = static_cast<int>(config.pattern.size());

  std::vector<TensorSpec> specs;
  specs.push_back({"embedding", {config.vocab_size, d}});
  for (int layer = 0; layer < config.num_layers(); ++layer) {
    const BlockKind kind = config.layer_kind(layer);
    const std::string base = "superblock." + std::to_string(layer / per) +
                             "." + std::to_string(layer % per) + ".";
    const std::string t = base + std::string(block_kind_name(kind)) + ".";
    specs.push_back({base + "temporal_norm.scale", {d}});
    if (kind == BlockKind::kRecurrent) {
      specs.push_back({t + "branch_a", {r, d}});
      specs.push_back({t + "branch_b", {r, d}});
      specs.push_back({t + "conv.weight", {w, r}});
      specs.push_back({t + "conv.bias", {r}});
      specs.push_back({t + "gate_a.weight", {r, r}});
      specs.push_back({t + "gate_a.bias", {r}});
      specs.push_back({t + "gate_x.weight", {r, r}});
      specs.push_back({t + "gate_x.bias", {r}});
      specs.push_back({t + "decay", {r}});
      specs.push_back({t + "out", {d, r}});
    } else {
      specs.push_back({t + "q", {qdim, d}});
      specs.push_back({t + "k", {hd, d}});
      specs.push_back({t + "v", {hd, d}});
      specs.push_back({t + "o", {d, qdim}});
    }
    specs.push_back({base + "mlp_norm.scale", {d}});
    specs.push_back({base + "mlp.gate.weight", {f, d}});
    specs.push_back({base + "mlp.gate.bias", {f}});
    specs.push_back({base + "mlp.up.weight", {f, d}});
    specs.push_back({base + "mlp.up.bias", {f}});
    specs.push_back({base + "mlp.down.weight", {d, f}});
    specs.push_back({base + "mlp.down.bias", {d}});
  }
  specs.push_back({"final_norm.scale", {d}});
  return specs;
}

ParameterSet init_random_weights(const ModelConfig& config,
                                 std::uint64_t seed) {
  ParameterSet params;
  for (const auto& spec : required_tensors(config)) {
    Tensor t;
    t.shape = spec.shape;
    t.data.assign(static_cast<std::size_t>(shape_numel(spec.shape)), 0.0f);
    std::mt19937_64 rng(derive_seed(seed, fnv1a64(spec.name)));
    switch (rule_for(spec.name)) {
      case InitRule::kZeros:
        break;
      case InitRule::kOnes:
        std::fill(t.data.begin(), t.data.end(), 1.0f);
        break;
      case InitRule::kEmbedding: {
        std::normal_distribution<double> normal(
            0.0, 1.0 / std::sqrt(static_cast<double>(spec.shape[1])));
        for (auto& v : t.data) v = static_cast<float>(normal(rng));
        break;
      }
      case InitRule::kNormalFanIn: {
        // Conv weights are stored [width, channels]; fan-in is the width.
        const double fan_in = static_cast<double>(
            spec.name.find("conv.weight") != std::string::npos
                ? spec.shape[0]
                : spec.shape.back());
        std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(fan_in));
        for (auto& v : t.data) v = static_cast<float>(normal(rng));
        break;
      }
      case InitRule::kDecay: {
        // Base decay a0 = exp(-c * softplus(decay)) drawn in [0.9, 0.999].
        std::uniform_real_distribution<double> uniform(0.9, 0.999);
        const double c = config.recurrence_gate_constant;
        for (auto& v : t.data) {
          const double a0 = uniform(rng);
          const double softplus_value = -std::log(a0) / c;
          v = static_cast<float>(std::log(std::expm1(softplus_value)));
        }
        break;
      }
    }
    params.insert(spec.name, std::move(t));
  }
  return params;
}

WeightArchive make_weight_archive(const ModelConfig& config,
                                  const ParameterSet& params) {
  WeightArchive archive;
  archive.config = config;
  std::uint64_t offset = 0;
  for (const auto& spec : required_tensors(config)) {
    const Tensor& t = params.at(spec.name);
    if (t.shape != spec.shape) {
      throw SchemaError("tensor '" + spec.name + "' has shape " +
                        shape_string(t.shape) + ", config requires " +
                        shape_string(spec.shape));
    }
    archive.header.push_back({spec.name, t.shape, "f32", offset});
    offset += t.data.size() * sizeof(float);
  }
  archive.payload.resize(offset);
  for (const auto& entry : archive.header) {
    const Tensor& t = params.at(entry.name);
    unsigned char* dst = archive.payload.data() + entry.byte_offset;
    for (std::size_t i = 0; i < t.data.size(); ++i) {
      detail::store_le(dst + i * sizeof(float), t.data[i]);
    }
  }
  return archive;
}

void write_weight_archive(std::ostream& out, const WeightArchive& archive) {
  nlohmann::json header;
  header["format"] = kFormatName;
  header["version"] = kFormatVersion;
  if (archive.config) header["config"] = *archive.config;
  header["tensors"] = nlohmann::json::array();
  for (const auto& e : archive.header) {
    header["tensors"].push_back({{"name", e.name},
                                 {"shape", e.shape},
                                 {"dtype", e.dtype},
                                 {"byte_offset", e.byte_offset}});
  }
  const std::string text = header.dump();
  unsigned char len[8];
  detail::store_le<std::uint64_t>(len, text.size());
  out.write(reinterpret_cast<const char*>(len), 8);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.write(reinterpret_cast<const char*>(archive.payload.data()),
            static_cast<std::streamsize>(archive.payload.size()));
  if (!out) throw IoError("failed to write weight archive");
}

WeightArchive read_weight_archive(std::istream& in) {
  unsigned char len[8];
  if (!in.read(reinterpret_cast<char*>(len), 8)) {
    throw CorruptArchiveError("weight archive shorter than its length prefix");
  }
  const auto header_len = detail::load_le<std::uint64_t>(len);
  if (header_len > (std::uint64_t{1} << 32)) {
    throw CorruptArchiveError("weight archive header length is implausible");
  }
  std::string text(header_len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(header_len))) {
    throw CorruptArchiveError("weight archive header is truncated");
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw CorruptArchiveError(std::string("weight archive header: ") +
                              e.what());
  }

  WeightArchive archive;
  try {
    if (header.value("format", "") != kFormatName) {
      throw SchemaError("not a longgen weight archive");
    }
    if (header.value("version", 0) != kFormatVersion) {
      throw SchemaError("unsupported weight archive version");
    }
    if (header.contains("config")) {
      archive.config = header.at("config").get<ModelConfig>();
    }
    for (const auto& t : header.at("tensors")) {
      archive.header.push_back({t.at("name").get<std::string>(),
                                t.at("shape").get<std::vector<std::int64_t>>(),
                                t.at("dtype").get<std::string>(),
                                t.at("byte_offset").get<std::uint64_t>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("weight archive header: ") + e.what());
  }
  archive.payload.assign(std::istreambuf_iterator<char>(in),
                         std::istreambuf_iterator<char>());
  return archive;
}

void save_weights(const std::string& path, const ModelConfig& config,
                  const ParameterSet& params) {
  std::ostringstream out(std::ios::binary);
  write_weight_archive(out, make_weight_archive(config, params));
  write_file_atomic(path, out.str());
}

WeightArchive read_weight_archive_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open weight archive '" + path + "'");
  return read_weight_archive(in);
}

ParameterSet load_weights(const WeightArchive& archive,
                          const ModelConfig& config) {
  const auto required = required_tensors(config);
  std::map<std::string, const WeightArchive::Entry*> by_name;
  for (const auto& e : archive.header) {
    if (!by_name.emplace(e.name, &e).second) {
      throw SchemaError("tensor '" + e.name + "' appears more than once");
    }
  }
  std::set<std::string> required_names;
  for (const auto& spec : required) {
    required_names.insert(spec.name);
    auto it = by_name.find(spec.name);
    if (it == by_name.end()) {
      throw SchemaError("missing tensor '" + spec.name + "'");
    }
    const auto& e = *it->second;
    if (e.dtype != "f32") {
      throw SchemaError("tensor '" + e.name + "' has dtype '" + e.dtype +
                        "', expected f32");
    }
    if (e.shape != spec.shape) {
      throw SchemaError("tensor '" + e.name + "' has shape " +
                        shape_string(e.shape) + ", config requires " +
                        shape_string(spec.shape));
    }
  }
  for (const auto& e : archive.header) {
    if (!required_names.count(e.name)) {
      throw SchemaError("unexpected tensor '" + e.name + "'");
    }
  }

  // Offsets must tile the payload exactly.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> extents;
  std::uint64_t declared = 0;
  for (const auto& e : archive.header) {
    const std::uint64_t bytes =
        static_cast<std::uint64_t>(shape_numel(e.shape)) * sizeof(float);
    extents.emplace_back(e.byte_offset, e.byte_offset + bytes);
    declared += bytes;
  }
  std::sort(extents.begin(), extents.end());
  for (std::size_t i = 1; i < extents.size(); ++i) {
    if (extents[i].first < extents[i - 1].second) {
      throw CorruptArchiveError("weight archive tensor extents overlap");
    }
  }
  if (archive.payload.size() < declared ||
      (!extents.empty() && archive.payload.size() < extents.back().second)) {
    throw CorruptArchiveError(
        "weight archive payload holds " +
        std::to_string(archive.payload.size()) + " bytes, header declares " +
        std::to_string(declared));
  }
  if (archive.payload.size() != declared) {
    throw CorruptArchiveError("weight archive payload has " +
                              std::to_string(archive.payload.size() - declared) +
                              " trailing bytes");
  }

  ParameterSet params;
  for (const auto& spec : required) {
    const auto& e = *by_name.at(spec.name);
    Tensor t;
    t.shape = e.shape;
    t.data.resize(static_cast<std::size_t>(shape_numel(e.shape)));
    const unsigned char* src = archive.payload.data() + e.byte_offset;
    for (std::size_t i = 0; i < t.data.size(); ++i) {
      t.data[i] = detail::load_le<float>(src + i * sizeof(float));
    }
    params.insert(spec.name, std::move(t));
  }
  return params;
}

}  // namespace longgen
