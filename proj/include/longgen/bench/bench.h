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

#include <json.hpp>

#include "longgen/core/config.h"
#include "longgen/decoder/sequence_model.h"

namespace longgen::bench {

// Reduced hybrid used for efficiency measurements: model_dim 128, 4 query
// heads of 32, 2 superblocks, window 128, vocabulary 1024.
ModelConfig bench_config();

struct MachineInfo {
  std::string cpu;
  unsigned hardware_threads = 0;
  std::string compiler;
  bool optimized = false;
};

MachineInfo describe_machine();

struct LatencyPoint {
  std::int64_t position = 0;
  double median_s = 0.0;
  double p90_s = 0.0;
  std::size_t state_bytes = 0;
};

struct LatencyOptions {
  std::vector<std::int64_t> positions = {1024, 4096, 16384};
  int warmup = 3;
  int repeats = 21;
  std::uint64_t seed = 0;
};

// Per-step wall time of a batch-1 session at each probe position. Each probe
// starts from the model's synthetic state for that position; `warmup` steps
// are run and discarded, then every repeat times one step from a fresh copy
// of the state. Throws InvalidArgument unless positions are strictly
// increasing and repeats >= 5.
std::vector<LatencyPoint> measure_step_latency(
    const decoder::SequenceModel& model, const LatencyOptions& options);

// Batch-size search under analytic memory accounting: a batch fits if
// batch * state_bytes_at(target_len) <= budget.
struct BatchSearch {
  std::int64_t batch_size = 0;
  std::size_t per_lane_bytes = 0;
  std::vector<std::int64_t> probed;  // batch sizes tried, in order
};

// Doubles from 1 until a batch no longer fits (or max_batch is reached),
// then bisects between the last fitting and first failing size. Throws
// InfeasibleError if one lane does not fit.
BatchSearch search_batch_size(const decoder::SequenceModel& model,
                              std::int64_t target_len,
                              std::size_t memory_budget_bytes,
                              std::int64_t max_batch = 4096);

struct ThroughputPoint {
  std::int64_t target_len = 0;
  std::int64_t batch_size = 0;
  std::size_t per_lane_bytes = 0;
  // Estimated seconds to decode batch_size lanes to target_len.
  double decode_seconds = 0.0;
  double tokens_per_s = 0.0;
  std::vector<std::int64_t> sampled_positions;
  std::vector<double> sampled_step_s;
};

struct ThroughputOptions {
  std::size_t memory_budget_bytes = 32u << 20;
  // Positions sampled along [1, target_len] to integrate the step time.
  int samples = 5;
  int repeats = 5;
  std::int64_t max_batch = 4096;
  std::uint64_t seed = 0;
};

// Finds the largest feasible batch, times one batched step at evenly spaced
// positions, and integrates the step-time curve with the trapezoid rule to
// estimate tokens/s = batch * target_len / decode time.
ThroughputPoint measure_throughput(const decoder::SequenceModel& model,
                                   std::int64_t target_len,
                                   const ThroughputOptions& options);

struct BenchReport {
  std::string model_id;
  std::uint64_t seed = 0;
  std::size_t memory_budget_bytes = 0;
  MachineInfo machine;
  std::vector<LatencyPoint> latency;
  std::vector<ThroughputPoint> throughput;
};

void to_json(nlohmann::json& j, const MachineInfo& info);
void to_json(nlohmann::json& j, const LatencyPoint& point);
void to_json(nlohmann::json& j, const ThroughputPoint& point);
void to_json(nlohmann::json& j, const BenchReport& report);

// One row per measurement: model, kind, x (position or target length), y
// (median seconds or tokens/s), batch size, state bytes.
void write_report_csv(std::ostream& out,
                      const std::vector<BenchReport>& reports);

// Two panels: tokens/s against target length and step latency against
// position, both with logarithmic length axes, one polyline per model.
std::string render_report_svg(const std::vector<BenchReport>& reports);

}  // namespace longgen::bench
