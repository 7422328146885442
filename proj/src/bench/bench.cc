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

#include "longgen/bench/bench.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "longgen/core/errors.h"
#include "longgen/core/types.h"

namespace longgen::bench {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double rank = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = static_cast<std::size_t>(std::ceil(rank));
  return v[lo] + (v[hi] - v[lo]) * (rank - static_cast<double>(lo));
}

// Median wall time of one batched step from copies of `lanes`.
double time_batched_step(
    const decoder::SequenceModel& model,
    const std::vector<std::unique_ptr<decoder::DecodeState>>& lanes,
    const std::vector<TokenId>& tokens, int warmup, int repeats,
    std::vector<double>* samples_out = nullptr) {
  std::vector<double> samples;
  for (int r = -warmup; r < repeats; ++r) {
    std::vector<std::unique_ptr<decoder::DecodeState>> copies;
    std::vector<decoder::DecodeState*> raw;
    copies.reserve(lanes.size());
    for (const auto& lane : lanes) {
      copies.push_back(lane->clone());
      raw.push_back(copies.back().get());
    }
    const auto start = Clock::now();
    const Eigen::MatrixXf logits = model.step_batch(tokens, raw);
    const double elapsed = seconds_since(start);
    if (!logits.allFinite()) {
      throw NumericInputError("benchmark step produced non-finite logits");
    }
    if (r >= 0) samples.push_back(elapsed);
  }
  if (samples_out != nullptr) *samples_out = samples;
  return quantile(samples, 0.5);
}

std::string read_cpu_model() {
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        return line.substr(line.find_first_not_of(' ', colon + 1));
      }
    }
  }
  return "unknown";
}

}  // namespace

ModelConfig bench_config() {
  ModelConfig c;
  c.vocab_size = 1024;
  c.model_dim = 128;
  c.num_superblocks = 2;
  c.attention_window = 128;
  c.num_query_heads = 4;
  c.head_dim = 32;
  return c;
}

MachineInfo describe_machine() {
  MachineInfo info;
  info.cpu = read_cpu_model();
  info.hardware_threads = std::thread::hardware_concurrency();
#if defined(__clang__)
  info.compiler = "clang " __clang_version__;
#elif defined(__GNUC__)
  info.compiler = "gcc " __VERSION__;
#else
  info.compiler = "unknown";
#endif
#ifdef NDEBUG
  info.optimized = true;
#endif
  return info;
}

std::vector<LatencyPoint> measure_step_latency(
    const decoder::SequenceModel& model, const LatencyOptions& options) {
  if (options.repeats < 5) throw InvalidArgument("need at least 5 repeats");
  if (options.warmup < 0) throw InvalidArgument("warmup must be >= 0");
  if (options.positions.empty()) throw InvalidArgument("no probe positions");
  for (std::size_t i = 0; i < options.positions.size(); ++i) {
    if (options.positions[i] < 0 ||
        (i > 0 && options.positions[i] <= options.positions[i - 1])) {
      throw InvalidArgument("probe positions must be strictly increasing");
    }
  }
  const TokenId token = static_cast<TokenId>(
      options.seed % static_cast<std::uint64_t>(model.vocab_size()));
  std::vector<LatencyPoint> points;
  for (std::int64_t position : options.positions) {
    std::vector<std::unique_ptr<decoder::DecodeState>> lanes;
    lanes.push_back(model.synthetic_state(
        position, derive_seed(options.seed, static_cast<std::uint64_t>(position))));
    std::vector<double> samples;
    time_batched_step(model, lanes, {token}, options.warmup, options.repeats,
                      &samples);
    points.push_back({position, quantile(samples, 0.5),
                      quantile(samples, 0.9), lanes.front()->bytes()});
  }
  return points;
}

BatchSearch search_batch_size(const decoder::SequenceModel& model,
                              std::int64_t target_len,
                              std::size_t memory_budget_bytes,
                              std::int64_t max_batch) {
  if (target_len < 1) throw InvalidArgument("target length must be >= 1");
  BatchSearch search;
  search.per_lane_bytes = std::max<std::size_t>(
      1, model.state_bytes_at(target_len));
  auto fits = [&](std::int64_t batch) {
    search.probed.push_back(batch);
    return static_cast<std::size_t>(batch) <=
           memory_budget_bytes / search.per_lane_bytes;
  };
  if (!fits(1)) {
    throw InfeasibleError("memory budget of " +
                          std::to_string(memory_budget_bytes) +
                          " bytes cannot hold one lane of " +
                          std::to_string(search.per_lane_bytes) + " bytes");
  }
  std::int64_t good = 1;
  std::int64_t bad = 0;
  while (good < max_batch) {
    const std::int64_t next = std::min(good * 2, max_batch);
    if (!fits(next)) {
      bad = next;
      break;
    }
    good = next;
  }
  if (bad != 0) {
    while (bad - good > 1) {
      const std::int64_t mid = good + (bad - good) / 2;
      (fits(mid) ? good : bad) = mid;
    }
  }
  search.batch_size = good;
  return search;
}

ThroughputPoint measure_throughput(const decoder::SequenceModel& model,
                                   std::int64_t target_len,
                                   const ThroughputOptions& options) {
  if (options.samples < 2) throw InvalidArgument("need at least 2 samples");
  const BatchSearch search = search_batch_size(
      model, target_len, options.memory_budget_bytes, options.max_batch);
  ThroughputPoint point;
  point.target_len = target_len;
  point.batch_size = search.batch_size;
  point.per_lane_bytes = search.per_lane_bytes;

  std::vector<TokenId> tokens(static_cast<std::size_t>(search.batch_size));
  for (std::size_t l = 0; l < tokens.size(); ++l) {
    tokens[l] = static_cast<TokenId>(derive_seed(options.seed, l) %
                                     static_cast<std::uint64_t>(
                                         model.vocab_size()));
  }
  for (int s = 0; s < options.samples; ++s) {
    // Step s consumes the token at this position, so the state holds
    // position - 1 tokens.
    const std::int64_t position =
        1 + (target_len - 1) * s / (options.samples - 1);
    std::vector<std::unique_ptr<decoder::DecodeState>> lanes;
    for (std::int64_t l = 0; l < search.batch_size; ++l) {
      lanes.push_back(model.synthetic_state(
          position - 1,
          derive_seed(options.seed, static_cast<std::uint64_t>(
                                        position * 65537 + l))));
    }
    point.sampled_positions.push_back(position);
    point.sampled_step_s.push_back(
        time_batched_step(model, lanes, tokens, 1, options.repeats));
  }
  for (std::size_t i = 1; i < point.sampled_positions.size(); ++i) {
    const double width = static_cast<double>(point.sampled_positions[i] -
                                             point.sampled_positions[i - 1]);
    point.decode_seconds +=
        width * 0.5 * (point.sampled_step_s[i] + point.sampled_step_s[i - 1]);
  }
  // The trapezoids cover target_len - 1 steps; count the first step once.
  point.decode_seconds += point.sampled_step_s.front();
  point.tokens_per_s = static_cast<double>(search.batch_size * target_len) /
                       point.decode_seconds;
  return point;
}

void to_json(nlohmann::json& j, const MachineInfo& info) {
  j = {{"cpu", info.cpu},
       {"hardware_threads", info.hardware_threads},
       {"compiler", info.compiler},
       {"optimized", info.optimized}};
}

void to_json(nlohmann::json& j, const LatencyPoint& p) {
  j = {{"position", p.position},
       {"median_s", p.median_s},
       {"p90_s", p.p90_s},
       {"state_bytes", p.state_bytes}};
}

void to_json(nlohmann::json& j, const ThroughputPoint& p) {
  j = {{"target_len", p.target_len},
       {"batch_size", p.batch_size},
       {"per_lane_bytes", p.per_lane_bytes},
       {"decode_seconds", p.decode_seconds},
       {"tokens_per_s", p.tokens_per_s},
       {"sampled_positions", p.sampled_positions},
       {"sampled_step_s", p.sampled_step_s}};
}

void to_json(nlohmann::json& j, const BenchReport& r) {
  j = {{"model_id", r.model_id},
       {"seed", r.seed},
       {"memory_budget_bytes", r.memory_budget_bytes},
       {"machine", r.machine},
       {"latency", r.latency},
       {"throughput", r.throughput}};
}

void write_report_csv(std::ostream& out,
                      const std::vector<BenchReport>& reports) {
  out << "model_id,kind,x,y,batch_size,state_bytes\n";
  for (const BenchReport& r : reports) {
    for (const LatencyPoint& p : r.latency) {
      out << r.model_id << ",latency," << p.position << ',' << p.median_s
          << ",1," << p.state_bytes << '\n';
    }
    for (const ThroughputPoint& p : r.throughput) {
      out << r.model_id << ",throughput," << p.target_len << ','
          << p.tokens_per_s << ',' << p.batch_size << ','
          << p.per_lane_bytes << '\n';
    }
  }
}

namespace {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

void render_panel(std::ostringstream& svg, double x0, const std::string& title,
                  const std::string& x_label, const std::string& y_label,
                  const std::vector<Series>& series) {
  constexpr double kW = 360, kH = 240, kPad = 50;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  double xmin = INFINITY, xmax = -INFINITY, ymax = 0;
  for (const Series& s : series) {
    for (const auto& [x, y] : s.points) {
      xmin = std::min(xmin, std::log2(x));
      xmax = std::max(xmax, std::log2(x));
      ymax = std::max(ymax, y);
    }
  }
  if (!(xmax > xmin)) xmax = xmin + 1;
  if (!(ymax > 0)) ymax = 1;
  auto px = [&](double x) {
    return x0 + kPad + (std::log2(x) - xmin) / (xmax - xmin) * (kW - 2 * kPad);
  };
  auto py = [&](double y) { return kH - kPad - y / ymax * (kH - 2 * kPad); };

  svg << "<text x='" << x0 + kW / 2 << "' y='20' text-anchor='middle'>"
      << title << "</text>\n";
  svg << "<line x1='" << x0 + kPad << "' y1='" << kH - kPad << "' x2='"
      << x0 + kW - kPad << "' y2='" << kH - kPad << "' stroke='black'/>\n";
  svg << "<line x1='" << x0 + kPad << "' y1='" << kPad << "' x2='"
      << x0 + kPad << "' y2='" << kH - kPad << "' stroke='black'/>\n";
  svg << "<text x='" << x0 + kW / 2 << "' y='" << kH - 12
      << "' text-anchor='middle' font-size='11'>" << x_label << "</text>\n";
  svg << "<text x='" << x0 + 12 << "' y='" << kH / 2
      << "' font-size='11' transform='rotate(-90 " << x0 + 12 << ' ' << kH / 2
      << ")' text-anchor='middle'>" << y_label << "</text>\n";
  svg << "<text x='" << x0 + kPad - 4 << "' y='" << kPad
      << "' text-anchor='end' font-size='10'>" << ymax << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kColors[i % 4];
    svg << "<polyline fill='none' stroke='" << color << "' points='";
    for (const auto& [x, y] : series[i].points) {
      svg << px(x) << ',' << py(y) << ' ';
    }
    svg << "'/>\n";
    for (const auto& [x, y] : series[i].points) {
      svg << "<circle cx='" << px(x) << "' cy='" << py(y) << "' r='3' fill='"
          << color << "'/>\n";
    }
    svg << "<text x='" << x0 + kW - kPad << "' y='" << kPad + 14 * i
        << "' text-anchor='end' font-size='11' fill='" << color << "'>"
        << series[i].label << "</text>\n";
  }
}

}  // namespace

std::string render_report_svg(const std::vector<BenchReport>& reports) {
  std::vector<Series> throughput;
  std::vector<Series> latency;
  for (const BenchReport& r : reports) {
    Series t{r.model_id, {}};
    for (const ThroughputPoint& p : r.throughput) {
      t.points.emplace_back(static_cast<double>(p.target_len), p.tokens_per_s);
    }
    Series l{r.model_id, {}};
    for (const LatencyPoint& p : r.latency) {
      l.points.emplace_back(static_cast<double>(p.position), p.median_s);
    }
    if (!t.points.empty()) throughput.push_back(std::move(t));
    if (!l.points.empty()) latency.push_back(std::move(l));
  }
  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='720' height='240' "
         "font-family='sans-serif'>\n";
  render_panel(svg, 0, "Max throughput under batch decoding",
               "target length (tokens, log)", "tokens/s", throughput);
  render_panel(svg, 360, "Per-step latency (batch 1)",
               "position (tokens, log)", "seconds", latency);
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace longgen::bench
