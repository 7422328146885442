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

// Acceptance run: one PASS/FAIL line per criterion; exits non-zero if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "longgen/bench/bench.h"
#include "longgen/blocks/scan.h"
#include "longgen/core/config.h"
#include "longgen/core/types.h"
#include "longgen/dataset/dataset.h"
#include "longgen/decoder/neural_model.h"
#include "longgen/decoder/sampling.h"
#include "longgen/decoder/scripted_model.h"
#include "longgen/evalkit/coherence.h"
#include "longgen/evalkit/judge.h"
#include "longgen/longform/longform.h"
#include "longgen/windowing/windowing.h"

namespace {

using namespace longgen;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename Scalar>
blocks::SeqMatrix<Scalar> sequential_oracle(const blocks::SeqMatrix<double>& a,
                                            const blocks::SeqMatrix<double>& b,
                                            const blocks::ChannelVector<double>& h0) {
  blocks::SeqMatrix<Scalar> h(a.rows(), a.cols());
  blocks::ChannelVector<double> state = h0;
  for (Eigen::Index t = 0; t < a.cols(); ++t) {
    state = a.col(t).cwiseProduct(state) + b.col(t);
    h.col(t) = state.cast<Scalar>();
  }
  return h;
}

Outcome scan_correctness() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  double worst_double = 0.0;
  double worst_single = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int len = 1 + static_cast<int>(rng() % 512);
    const int dim = 1 + static_cast<int>(rng() % 64);
    blocks::SeqMatrix<double> a(dim, len), b(dim, len);
    blocks::ChannelVector<double> h0(dim);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      a.data()[i] = unit(rng);
      b.data()[i] = sym(rng);
    }
    for (int i = 0; i < dim; ++i) h0(i) = sym(rng);
    const blocks::SeqMatrix<double> ref = sequential_oracle<double>(a, b, h0);
    worst_double = std::max(
        worst_double,
        (blocks::rglru_scan<double>(a, b, h0) - ref).cwiseAbs().maxCoeff());
    const blocks::SeqMatrix<float> af = a.cast<float>();
    const blocks::SeqMatrix<float> bf = b.cast<float>();
    const blocks::ChannelVector<float> hf = h0.cast<float>();
    // Single-precision output against the double recurrence on the same
    // float-rounded inputs.
    const blocks::SeqMatrix<double> ref_f = sequential_oracle<double>(
        af.cast<double>(), bf.cast<double>(), hf.cast<double>());
    worst_single = std::max(
        worst_single,
        (blocks::rglru_scan<float>(af, bf, hf).cast<double>() - ref_f)
            .cwiseAbs()
            .maxCoeff());
  }
  const double elapsed = seconds_since(start);
  return {worst_double < 1e-12 && worst_single < 1e-5 && elapsed < 30.0,
          fmt("max abs error double %.2e (< 1e-12), single %.2e (< 1e-5), "
              "%.1f s (< 30 s)",
              worst_double, worst_single, elapsed)};
}

Outcome gradient_check() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  constexpr int kLen = 16;
  constexpr double kStep = 1e-6;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 1 + static_cast<int>(rng() % 8);
    blocks::SeqMatrix<double> a(dim, kLen), b(dim, kLen);
    blocks::ChannelVector<double> h0(dim), u(dim);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      a.data()[i] = unit(rng);
      b.data()[i] = sym(rng);
    }
    for (int i = 0; i < dim; ++i) {
      h0(i) = sym(rng);
      u(i) = sym(rng);
    }
    const auto grad = blocks::recurrence_gradient<double>(a, b, h0, u);
    auto loss = [&](const blocks::SeqMatrix<double>& aa,
                    const blocks::SeqMatrix<double>& bb,
                    const blocks::ChannelVector<double>& hh) {
      return u.dot(sequential_oracle<double>(aa, bb, hh).col(kLen - 1));
    };
    std::vector<double> analytic;
    std::vector<double> numeric;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      auto plus = a, minus = a;
      plus.data()[i] += kStep;
      minus.data()[i] -= kStep;
      numeric.push_back((loss(plus, b, h0) - loss(minus, b, h0)) / (2 * kStep));
      analytic.push_back(grad.da.data()[i]);
    }
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      auto plus = b, minus = b;
      plus.data()[i] += kStep;
      minus.data()[i] -= kStep;
      numeric.push_back((loss(a, plus, h0) - loss(a, minus, h0)) / (2 * kStep));
      analytic.push_back(grad.db.data()[i]);
    }
    for (int i = 0; i < dim; ++i) {
      auto plus = h0, minus = h0;
      plus(i) += kStep;
      minus(i) -= kStep;
      numeric.push_back((loss(a, b, plus) - loss(a, b, minus)) / (2 * kStep));
      analytic.push_back(grad.dh0(i));
    }
    const Eigen::Map<const Eigen::VectorXd> g(analytic.data(),
                                              static_cast<Eigen::Index>(analytic.size()));
    const Eigen::Map<const Eigen::VectorXd> n(numeric.data(),
                                              static_cast<Eigen::Index>(numeric.size()));
    worst = std::max(worst, (g - n).norm() / std::max(g.norm(), 1e-300));
  }
  return {worst < 1e-6,
          fmt("worst normwise relative error %.2e over 100 instances (< 1e-6)",
              worst)};
}

Outcome step_parallel_equivalence() {
  const ModelConfig config = desk_config();
  const decoder::NeuralModel model = decoder::make_hybrid_model(config, 3);
  std::mt19937_64 rng(3);
  TokenStream tokens;
  for (int i = 0; i < 256; ++i) {
    tokens.ids.push_back(static_cast<TokenId>(rng() % config.vocab_size));
  }
  const Eigen::MatrixXf parallel = model.forward_parallel(tokens);
  auto state = model.init_state();
  double worst = 0.0;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const decoder::Logits step = model.step(tokens.ids[t], *state);
    worst = std::max(
        worst, static_cast<double>(
                   (step - parallel.col(static_cast<Eigen::Index>(t)))
                       .cwiseAbs()
                       .maxCoeff()));
  }
  // Editing the suffix from position 128 on must leave earlier logits intact.
  TokenStream edited = tokens;
  for (std::size_t t = 128; t < edited.size(); ++t) {
    edited.ids[t] = (edited.ids[t] + 1) % config.vocab_size;
  }
  const Eigen::MatrixXf after = model.forward_parallel(edited);
  const bool causal = after.leftCols(128) == parallel.leftCols(128) &&
                      after.col(128) != parallel.col(128);
  return {worst < 1e-5 && causal,
          fmt("max abs logit difference %.2e (< 1e-5); suffix edit %s",
              worst, causal ? "leaves prefix logits bit-identical"
                            : "CHANGED prefix logits")};
}

Outcome constant_memory() {
  ModelConfig config = desk_config();
  config.vocab_size = 256;
  config.model_dim = 64;
  config.num_superblocks = 2;
  config.num_query_heads = 2;
  config.head_dim = 32;
  config.attention_window = 64;
  const decoder::NeuralModel hybrid = decoder::make_hybrid_model(config, 4);
  decoder::DecoderSession session(hybrid, {}, 4);
  session.feed(TokenId{0});
  std::vector<std::pair<std::int64_t, std::size_t>> probes;
  while (session.position() < 16384) {
    const std::int64_t p = session.position();
    if (p == 1 || p == 1000) probes.emplace_back(p, session.state_bytes());
    session.emit();
  }
  probes.emplace_back(session.position(), session.state_bytes());
  const bool hybrid_ok = probes.size() == 3 &&
                         probes[0].second == probes[1].second &&
                         probes[1].second == probes[2].second;

  const decoder::NeuralModel transformer =
      decoder::make_transformer_baseline(config, 4);
  const std::size_t row = static_cast<std::size_t>(config.num_layers()) * 2 *
                          static_cast<std::size_t>(config.head_dim) *
                          sizeof(float);
  decoder::DecoderSession baseline(transformer, {}, 4);
  baseline.feed(TokenId{0});
  bool linear = true;
  while (baseline.position() < 1024) {
    linear &= baseline.state_bytes() ==
              static_cast<std::size_t>(baseline.position()) * row;
    baseline.emit();
  }
  for (std::int64_t p : {1000, 16384}) {
    linear &= transformer.state_bytes_at(p) == static_cast<std::size_t>(p) * row;
  }
  return {hybrid_ok && linear,
          fmt("hybrid state bytes at 1/1000/16384 = %zu/%zu/%zu; baseline KV "
              "bytes %s position x %zu",
              probes[0].second, probes[1].second, probes[2].second,
              linear ? "==" : "!=", row)};
}

Outcome windowing_round_trip() {
  std::mt19937_64 rng(5);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::int64_t width = 2 + static_cast<std::int64_t>(rng() % 200);
    const std::int64_t overlap =
        2 * static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>((width + 1) / 2));
    const std::int64_t len = static_cast<std::int64_t>(rng() % 3000);
    if (overlap >= width) continue;
    std::vector<TokenId> stream(static_cast<std::size_t>(len));
    for (auto& t : stream) t = static_cast<TokenId>(rng() % 32768);
    const auto plan = windowing::plan_tokenization_windows(len, width, overlap);
    const auto merged = windowing::merge_windows(
        windowing::tokenize_windows(stream, plan, windowing::identity_tokenizer),
        plan);
    mismatches += merged != stream;
  }
  const auto fixture = windowing::plan_tokenization_windows(11, 5, 2);
  const std::vector<windowing::Span> expected = {{0, 4}, {4, 7}, {7, 11}};
  std::vector<windowing::Span> keeps;
  for (const auto& w : fixture.windows) keeps.push_back(w.keep);
  const bool fixture_ok = keeps == expected;
  return {mismatches == 0 && fixture_ok,
          fmt("%d/1000 randomized round trips differ; (11, 5, 2) keep ranges "
              "%s [0,4),[4,7),[7,11)",
              mismatches, fixture_ok ? "==" : "!=")};
}

Outcome synthesis_schedule() {
  const auto plan = windowing::plan_synthesis_windows(240.0);
  const std::vector<double> expected = {25.0, 48.0, 71.0, 94.0};
  const bool ok = plan.boundary_times.size() >= 4 &&
                  std::equal(expected.begin(), expected.end(),
                             plan.boundary_times.begin());
  std::string got;
  for (std::size_t i = 0; i < std::min<std::size_t>(4, plan.boundary_times.size()); ++i) {
    got += fmt("%s%g", i ? ", " : "", plan.boundary_times[i]);
  }
  return {ok, "first boundaries " + got + " s (expected 25, 48, 71, 94)"};
}

Outcome token_arithmetic() {
  const std::int64_t a = duration_to_tokens(30.0, 25.0);
  const std::int64_t b = duration_to_tokens(960.0, 25.0);
  return {a == 750 && b == 24000,
          fmt("30 s -> %lld tokens, 960 s -> %lld tokens", static_cast<long long>(a),
              static_cast<long long>(b))};
}

Outcome slide_and_prompt_check() {
  const auto model = decoder::ScriptedModel::random_sparse(512, 4, 8);
  std::mt19937_64 rng(8);
  TokenStream prompt;
  for (int i = 0; i < 250; ++i) prompt.ids.push_back(static_cast<TokenId>(rng() % 512));
  bool ok = true;
  std::string detail;
  for (double target : {240.0, 960.0}) {
    longform::GenerationSpec spec;
    spec.prompt = prompt;
    spec.target_duration_s = target;
    spec.mode = longform::GenerationMode::kSlideAndPrompt;
    spec.seed = 8;
    const auto result = longform::generate_long(spec, model);
    std::vector<TokenId> history = prompt.ids;
    history.insert(history.end(), result.continuation.ids.begin(),
                   result.continuation.ids.end());
    int bad = 0;
    for (std::size_t k = 1; k < result.chunks.size(); ++k) {
      const auto& c = result.chunks[k];
      const auto end = static_cast<std::ptrdiff_t>(prompt.size() + c.output_begin);
      bad += c.context != std::vector<TokenId>(history.begin() + end - 75,
                                               history.begin() + end);
    }
    const auto expected = spec.continuation_tokens();
    ok &= bad == 0 &&
          static_cast<std::int64_t>(result.continuation.size()) == expected;
    detail += fmt("%s%.0f s: %zu tokens (expected %lld), %zu chunks, %d bad "
                  "re-prompts",
                  detail.empty() ? "" : "; ", target, result.continuation.size(),
                  static_cast<long long>(expected), result.chunks.size(), bad);
  }
  return {ok, detail};
}

// Order-sensitive judge whose verdict is an arbitrary function of the prompt.
class HashJudge final : public evalkit::Judge {
 public:
  std::string name() const override { return "hash"; }
  std::string complete(const std::string& prompt) const override {
    static constexpr const char* kLabels[] = {"A>>B", "A>B", "A=B", "B>A", "B>>A"};
    return std::string("[[") + kLabels[fnv1a64(prompt) % 5] + "]]";
  }
};

std::string random_text(std::mt19937_64& rng, int words) {
  std::string s;
  for (int i = 0; i < words; ++i) {
    s += (i ? " w" : "w") + std::to_string(rng() % 60);
  }
  return s;
}

Outcome eval_symmetry() {
  std::mt19937_64 rng(9);
  std::vector<evalkit::TranscriptPair> self;
  for (int i = 0; i < 30; ++i) {
    const std::string t = random_text(rng, 80);
    self.push_back({std::to_string(i), t, t});
  }
  const auto self_result = evalkit::side_by_side(self, evalkit::MockJudge{});
  const bool fifty = self_result.win_percent() == 50.0;
  int violations = 0;
  const HashJudge hash;
  for (int set = 0; set < 50; ++set) {
    std::vector<evalkit::TranscriptPair> pairs, flipped;
    const int n = 1 + static_cast<int>(rng() % 10);
    for (int i = 0; i < n; ++i) {
      evalkit::TranscriptPair p{std::to_string(i), random_text(rng, 40),
                                random_text(rng, 50)};
      flipped.push_back({p.id, p.text_b, p.text_a});
      pairs.push_back(std::move(p));
    }
    for (const evalkit::Judge* judge :
         {static_cast<const evalkit::Judge*>(&hash),
          static_cast<const evalkit::Judge*>(new evalkit::MockJudge)}) {
      const double w = *evalkit::side_by_side(pairs, *judge).win_percent();
      const double f = *evalkit::side_by_side(flipped, *judge).win_percent();
      violations += std::abs(f - (100.0 - w)) > 1e-9;
      if (judge != &hash) delete judge;
    }
  }
  return {fifty && violations == 0,
          fmt("self win %.1f%% (expected 50.0); %d/100 flip-map violations",
              *self_result.win_percent(), violations)};
}

Outcome scl_mechanics() {
  const evalkit::HashedTrigramEmbedder e;
  std::mt19937_64 rng(10);
  bool counts = true;
  for (int words : {0, 99, 100, 101, 350, 1000}) {
    const auto s = evalkit::sc_l("a prompt", words ? random_text(rng, words) : "", e);
    counts &= s.points.size() == static_cast<std::size_t>(words / 100);
  }
  const std::string segment = random_text(rng, 100);
  const auto self = evalkit::sc_l(segment, segment, e);
  const double self_score = self.points.at(0).score;

  // Find two words whose trigram buckets are disjoint.
  double disjoint = -1.0;
  const std::vector<std::string> words = {"ship", "harbor", "lantern", "quiet",
                                          "meadow", "thunder", "velvet", "ember"};
  for (std::size_t i = 0; i < words.size() && disjoint < 0; ++i) {
    for (std::size_t j = i + 1; j < words.size() && disjoint < 0; ++j) {
      auto bi = evalkit::HashedTrigramEmbedder::buckets(words[i]);
      auto bj = evalkit::HashedTrigramEmbedder::buckets(words[j]);
      std::vector<int> common;
      std::set_intersection(bi.begin(), bi.end(), bj.begin(), bj.end(),
                            std::back_inserter(common));
      if (common.empty()) {
        disjoint = evalkit::cosine_similarity(e.embed(words[i]), e.embed(words[j]));
      }
    }
  }
  const auto strata = evalkit::time_strata(10.0, 240.0);
  const std::vector<evalkit::TimeSpan> expected = {
      {10, 60}, {60, 120}, {120, 180}, {180, 240}};
  const bool ok = counts && std::abs(self_score - 1.0) <= 1e-6 &&
                  disjoint == 0.0 && strata == expected;
  return {ok, fmt("point counts %s; self-similarity %.9f; disjoint-trigram "
                  "cosine %.1f; strata %s",
                  counts ? "ok" : "WRONG", self_score, disjoint,
                  strata == expected ? "[10,60) [60,120) [120,180) [180,240)"
                                     : "WRONG")};
}

Outcome dataset_agglomeration() {
  using dataset::UtteranceRecord;
  const dataset::UtteranceManifest fixture = {
      {"u1", "c", "s", 0, 100, ""}, {"u2", "c", "s", 100, 200, ""},
      {"u3", "c", "s", 200, 300, ""}};
  const auto spans = dataset::agglomerate(fixture);
  const bool fixture_ok = spans.size() == 2 && spans[0].duration_s == 200.0 &&
                          spans[1].duration_s == 100.0;
  const auto oversize = dataset::agglomerate({{"u", "c", "s", 0, 300, ""}});
  const bool oversize_ok = oversize.size() == 1 && oversize[0].duration_s == 300.0;

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dur(0.5, 80.0);
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    dataset::UtteranceManifest m;
    const int chapters = 1 + static_cast<int>(rng() % 4);
    for (int c = 0; c < chapters; ++c) {
      double t = 0;
      const int n = static_cast<int>(rng() % 30);
      for (int k = 0; k < n; ++k) {
        const double d = rng() % 40 == 0 ? 400.0 : dur(rng);
        m.push_back({fmt("%d_%d_%d", trial, c, k), fmt("ch%d", c),
                     rng() % 4 == 0 ? "s1" : "s0", t, t + d, ""});
        t += d + 0.25;
      }
    }
    const auto out = dataset::agglomerate(m);
    std::size_t row = 0;
    for (const auto& s : out) {
      double sum = 0;
      for (const auto& id : s.utterance_ids) {
        if (row >= m.size() || m[row].utterance_id != id ||
            m[row].chapter_id != s.chapter_id) {
          ++violations;
        }
        if (row < m.size()) sum += m[row].duration_s();
        ++row;
      }
      if (s.utterance_ids.size() > 1 && s.duration_s > 240.0 + 1e-9) ++violations;
      if (std::abs(sum - s.duration_s) > 1e-9) ++violations;
    }
    if (row != m.size()) ++violations;
  }
  return {fixture_ok && oversize_ok && violations == 0,
          fmt("3x100 s -> %zu spans (%.0f, %.0f); oversize kept %s; %d "
              "invariant violations over 1000 manifests",
              spans.size(), spans.empty() ? 0.0 : spans[0].duration_s,
              spans.size() < 2 ? 0.0 : spans[1].duration_s,
              oversize_ok ? "whole" : "WRONG", violations)};
}

Outcome efficiency_trends() {
  const auto start = Clock::now();
  const ModelConfig config = bench::bench_config();
  const decoder::NeuralModel hybrid = decoder::make_hybrid_model(config, 12);
  const decoder::NeuralModel transformer =
      decoder::make_transformer_baseline(config, 12);
  bench::LatencyOptions lat;
  lat.positions = {1024, 16384};
  const auto hl = bench::measure_step_latency(hybrid, lat);
  const auto tl = bench::measure_step_latency(transformer, lat);
  const double hybrid_ratio = hl[1].median_s / hl[0].median_s;
  const double transformer_ratio = tl[1].median_s / tl[0].median_s;

  bench::ThroughputOptions thr;
  std::vector<double> ratios;
  std::string batches;
  for (std::int64_t len : {1024, 4096, 16384}) {
    const auto h = bench::measure_throughput(hybrid, len, thr);
    const auto t = bench::measure_throughput(transformer, len, thr);
    ratios.push_back(h.tokens_per_s / t.tokens_per_s);
    batches += fmt("%s%lld:%lld/%lld", batches.empty() ? "" : " ",
                   static_cast<long long>(len), static_cast<long long>(h.batch_size),
                   static_cast<long long>(t.batch_size));
  }
  const bool monotone = std::is_sorted(ratios.begin(), ratios.end());
  const double elapsed = seconds_since(start);
  return {hybrid_ratio <= 1.25 && transformer_ratio >= 4.0 && monotone &&
              elapsed < 600.0,
          fmt("latency 16384/1024: hybrid %.2fx (<= 1.25), baseline %.2fx "
              "(>= 4); throughput ratio %.1f, %.1f, %.1f (non-decreasing; "
              "batches %s); %.0f s",
              hybrid_ratio, transformer_ratio, ratios[0], ratios[1], ratios[2],
              batches.c_str(), elapsed)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"scan correctness", scan_correctness},
      {"gradient check", gradient_check},
      {"step/parallel equivalence and causality", step_parallel_equivalence},
      {"constant memory", constant_memory},
      {"windowing round trip", windowing_round_trip},
      {"synthesis schedule", synthesis_schedule},
      {"token arithmetic", token_arithmetic},
      {"slide-and-prompt", slide_and_prompt_check},
      {"eval symmetry", eval_symmetry},
      {"SC-L mechanics", scl_mechanics},
      {"dataset agglomeration", dataset_agglomeration},
      {"efficiency trends", efficiency_trends},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    failures += !outcome.pass;
    std::printf("%s %2zu %s: %s\n", outcome.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first, outcome.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
