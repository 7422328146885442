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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "longgen/core/config.h"

namespace longgen {

struct Tensor {
  std::vector<std::int64_t> shape;
  std::vector<float> data;

  std::int64_t numel() const;
  bool operator==(const Tensor& other) const;  // bitwise on data
};

// Named, immutable-after-load collection of model tensors.
class ParameterSet {
 public:
  void insert(std::string name, Tensor tensor);
  const Tensor& at(const std::string& name) const;
  bool contains(const std::string& name) const;
  std::size_t size() const { return tensors_.size(); }
  std::size_t total_bytes() const;
  const std::map<std::string, Tensor>& tensors() const { return tensors_; }
  bool operator==(const ParameterSet& other) const;

 private:
  std::map<std::string, Tensor> tensors_;
};

struct TensorSpec {
  std::string name;
  std::vector<std::int64_t> shape;
};

// Tensor inventory a config requires, in canonical order. Names follow
// `superblock.<s>.<j>.<kind>.<role>` for temporal blocks, where s is the
// superblock index and j the position inside the superblock pattern.
std::vector<TensorSpec> required_tensors(const ModelConfig& config);

// Deterministic given (config, seed). Recurrence decay parameters are drawn
// so that the base per-channel decay lies in [0.9, 0.999].
ParameterSet init_random_weights(const ModelConfig& config, std::uint64_t seed);

// Archive layout: u64 little-endian header length, UTF-8 JSON header, then a
// payload of packed little-endian f32 tensors. Offsets are relative to the
// payload start.
struct WeightArchive {
  struct Entry {
    std::string name;
    std::vector<std::int64_t> shape;
    std::string dtype;
    std::uint64_t byte_offset = 0;
  };
  std::vector<Entry> header;
  std::optional<ModelConfig> config;
  std::vector<std::uint8_t> payload;
};

WeightArchive make_weight_archive(const ModelConfig& config,
                                  const ParameterSet& params);
void write_weight_archive(std::ostream& out, const WeightArchive& archive);
WeightArchive read_weight_archive(std::istream& in);

void save_weights(const std::string& path, const ModelConfig& config,
                  const ParameterSet& params);
WeightArchive read_weight_archive_file(const std::string& path);

// Validates the archive against the config inventory and materializes every
// tensor. Throws SchemaError naming the offending tensor, or
// CorruptArchiveError if the payload does not hold the declared bytes.
ParameterSet load_weights(const WeightArchive& archive,
                          const ModelConfig& config);

}  // namespace longgen
