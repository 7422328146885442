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

#include "longgen/cli/cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "longgen/bench/bench.h"
#include "longgen/core/config.h"
#include "longgen/core/errors.h"
#include "longgen/core/file_io.h"
#include "longgen/core/token_io.h"
#include "longgen/core/weights.h"
#include "longgen/dataset/dataset.h"
#include "longgen/decoder/neural_model.h"
#include "longgen/decoder/scoring.h"
#include "longgen/decoder/scripted_model.h"
#include "longgen/evalkit/coherence.h"
#include "longgen/evalkit/judge.h"
#include "longgen/evalkit/ngram.h"
#include "longgen/longform/longform.h"
#include "longgen/windowing/windowing.h"

namespace longgen::cli {
namespace {

using nlohmann::json;

// Nested JSON objects address subcommands; keys may use '_' for '-'.
class JsonConfig final : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool,
                        std::string) const override {
    return "{}\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    json root;
    try {
      root = json::parse(in);
    } catch (const json::exception& e) {
      throw InvalidArgument(std::string("config file is not JSON: ") +
                            e.what());
    }
    if (!root.is_object()) {
      throw InvalidArgument("config file must hold a JSON object");
    }
    std::vector<CLI::ConfigItem> items;
    std::vector<std::string> parents;
    flatten(root, parents, items);
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw InvalidArgument("config values must be scalars or arrays of scalars");
  }

  static void flatten(const json& node, std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : node.items()) {
      std::string name = key;
      std::replace(name.begin(), name.end(), '_', '-');
      if (value.is_object()) {
        parents.push_back(name);
        flatten(value, parents, items);
        parents.pop_back();
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = name;
      if (value.is_array()) {
        for (const json& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }
};

json typed_value(const std::string& s) {
  if (s.empty()) return s;
  const json parsed = json::parse(s, nullptr, false);
  if (parsed.is_discarded() || parsed.is_object() || parsed.is_array() ||
      parsed.is_string()) {
    return s;
  }
  return parsed;
}

json resolved_options(const CLI::App& app) {
  json j = json::object();
  for (const CLI::Option* opt : app.get_options()) {
    const auto& names = opt->get_lnames();
    if (names.empty() || names.front() == "help" || names.front() == "config") {
      continue;
    }
    std::vector<std::string> values;
    if (opt->count() > 0) {
      values = opt->results();
    } else if (!opt->get_default_str().empty()) {
      values = {opt->get_default_str()};
    }
    if (values.empty()) {
      j[names.front()] = opt->get_expected_max() == 0 ? json(false) : json(nullptr);
    } else if (values.size() == 1 && opt->get_expected_max() <= 1) {
      j[names.front()] = typed_value(values.front());
    } else {
      json arr = json::array();
      for (const std::string& v : values) arr.push_back(typed_value(v));
      j[names.front()] = arr;
    }
  }
  for (const CLI::App* sub : app.get_subcommands()) {
    j[sub->get_name()] = resolved_options(*sub);
  }
  return j;
}

// Leaf subcommand and its space-joined path.
std::pair<const CLI::App*, std::string> selected_command(const CLI::App& app) {
  const CLI::App* node = &app;
  std::string path;
  while (!node->get_subcommands().empty()) {
    node = node->get_subcommands().front();
    path += (path.empty() ? "" : " ") + node->get_name();
  }
  return {node, path};
}

std::vector<TokenStream> read_streams(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open token file '" + path + "'");
  char magic[4] = {};
  in.read(magic, 4);
  const bool binary = in.gcount() == 4 && std::string(magic, 4) == "TOKS";
  in.clear();
  in.seekg(0);
  if (binary) return {read_binary_tokens(in).stream};
  return read_jsonl_tokens(in);
}

json parse_json_file(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw InvalidArgument("'" + path + "' is not valid JSON: " + e.what());
  }
}

ModelConfig preset_config(const std::string& name) {
  if (name == "desk") return desk_config();
  if (name == "desk-transformer") return transformer_config(desk_config());
  if (name == "bench") return bench::bench_config();
  if (name == "bench-transformer") {
    return transformer_config(bench::bench_config());
  }
  throw InvalidArgument("unknown model preset '" + name +
                        "' (desk, desk-transformer, bench, bench-transformer)");
}

// Shared state of one dispatch.
struct Run {
  Run(std::ostream& o, std::ostream& e) : out(o), err(e) {}

  std::ostream& out;
  std::ostream& err;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string sidecar;
  json result = json::object();
  std::string primary_output;

  // Writes `text` to `path`, or to `out` when no path was given.
  void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
      out << text;
    } else {
      write_file_atomic(path, text);
      if (primary_output.empty()) primary_output = path;
    }
  }
};

struct SamplingFlags {
  double temperature = 1.0;
  int top_k = 0;
  bool greedy = false;

  void add(CLI::App* app) {
    app->add_option("--temperature", temperature, "Softmax temperature");
    app->add_option("--top-k", top_k, "Keep the k most likely tokens (0 = all)");
    app->add_flag("--greedy", greedy, "Pick the most likely token");
  }
  decoder::SamplingOptions options() const {
    return {temperature, greedy, top_k};
  }
};

struct ModelFlags {
  std::string model = "builtin:desk";
  std::uint64_t model_seed = 0;

  void add(CLI::App* app) {
    app->add_option("--model", model,
                    "builtin:<preset>, scripted/neural JSON spec, or weight "
                    "archive");
    app->add_option("--model-seed", model_seed,
                    "Weight seed for builtin and neural JSON models");
  }
  std::unique_ptr<decoder::SequenceModel> load() const {
    return load_model(model, model_seed);
  }
};

// ---------------------------------------------------------------- generate

struct GenerateFlags {
  ModelFlags model;
  SamplingFlags sampling;
  std::string prompt;
  std::string out;
  double target_s = 240.0;
  double reprompt_s = 3.0;
  double chunk_s = 30.0;
  std::vector<std::int64_t> probes;
};

void add_generate(CLI::App& app, Run& run, GenerateFlags& f,
                  longform::GenerationMode mode) {
  const bool slide = mode == longform::GenerationMode::kSlideAndPrompt;
  CLI::App* sub = app.add_subcommand(
      slide ? "extend" : "generate",
      slide ? "Extend a prompt by slide-and-prompt chunks"
            : "Continue a prompt in one constant-state session");
  f.model.add(sub);
  f.sampling.add(sub);
  sub->add_option("--prompt", f.prompt, "Prompt token file")->required();
  sub->add_option("--out", f.out, "Output token file (.jsonl or binary)")
      ->required();
  sub->add_option("--target-s", f.target_s,
                  "Total duration of prompt plus continuation");
  if (slide) {
    sub->add_option("--reprompt-s", f.reprompt_s,
                    "Context carried into each new chunk");
    sub->add_option("--chunk-s", f.chunk_s, "Longest chunk a model sees");
  } else {
    sub->add_option("--probe", f.probes,
                    "Session positions at which to record state bytes");
  }
  sub->callback([&run, &f, mode] {
    const auto model = f.model.load();
    longform::GenerationSpec spec;
    spec.prompt = read_token_file(f.prompt);
    spec.target_duration_s = f.target_s;
    spec.sampling = f.sampling.options();
    spec.seed = run.seed;
    spec.mode = mode;
    spec.reprompt_s = f.reprompt_s;
    spec.chunk_limit_s = f.chunk_s;
    spec.probe_positions = f.probes;
    const longform::GenerationResult result =
        longform::generate_long(spec, *model);
    write_token_file(f.out, result.continuation,
                     static_cast<std::uint32_t>(model->vocab_size()));
    run.primary_output = f.out;
    run.result = result;
    run.out << "wrote " << result.continuation.size() << " tokens to "
            << f.out << '\n';
  });
}

// ------------------------------------------------------------------- score

struct ScoreFlags {
  ModelFlags model;
  std::string tokens;
  std::string positive;
  std::string negative;
  std::string out;
};

void add_score(CLI::App& app, Run& run, ScoreFlags& f) {
  CLI::App* sub = app.add_subcommand(
      "score", "Log-likelihood of token streams or contrastive accuracy");
  f.model.add(sub);
  auto* tokens = sub->add_option("--tokens", f.tokens,
                                 "Token file; every record is scored");
  auto* pos = sub->add_option("--positive", f.positive,
                              "Token records that should score higher");
  auto* neg = sub->add_option("--negative", f.negative,
                              "Token records paired with --positive");
  pos->needs(neg);
  neg->needs(pos);
  tokens->excludes(pos);
  sub->add_option("--out", f.out, "JSON-lines output (default stdout)");
  sub->callback([&run, &f] {
    const auto model = f.model.load();
    std::ostringstream text;
    if (!f.tokens.empty()) {
      const auto streams = read_streams(f.tokens);
      json rows = json::array();
      for (std::size_t i = 0; i < streams.size(); ++i) {
        const double ll = decoder::score_loglikelihood(*model, streams[i]);
        const json row = {{"index", i},
                          {"tokens", streams[i].size()},
                          {"log_likelihood", ll}};
        text << row.dump() << '\n';
        rows.push_back(row);
      }
      run.result = {{"streams", rows}};
    } else if (!f.positive.empty()) {
      const auto p = read_streams(f.positive);
      const auto n = read_streams(f.negative);
      if (p.size() != n.size()) {
        throw InvalidArgument("--positive holds " + std::to_string(p.size()) +
                              " records but --negative holds " +
                              std::to_string(n.size()));
      }
      std::vector<decoder::ContrastivePair> pairs;
      for (std::size_t i = 0; i < p.size(); ++i) pairs.push_back({p[i], n[i]});
      const double accuracy = decoder::contrastive_accuracy(*model, pairs);
      run.result = {{"pairs", pairs.size()}, {"accuracy", accuracy}};
      text << run.result.dump() << '\n';
    } else {
      throw InvalidArgument("score needs --tokens or --positive/--negative");
    }
    run.emit(f.out, text.str());
  });
}

// ------------------------------------------------------------------ window

struct WindowFlags {
  std::string kind = "tokenize";
  std::int64_t length = 0;
  std::int64_t width = 750;
  std::int64_t overlap = 0;
  bool dataset_mode = false;
  double tail_drop_s = 10.0;
  double frame_rate = kDefaultFrameRateHz;
  double continuation_s = 240.0;
  double prompt_s = 3.0;
  double width_s = 30.0;
  double overlap_s = 4.0;
  double probe_s = 5.0;
  std::string out;

  std::string plan;
  std::string windows;
  std::uint32_t vocab = kDefaultVocabSize;
  std::string merged;
};

void add_window(CLI::App& app, Run& run, WindowFlags& f) {
  CLI::App* window =
      app.add_subcommand("window", "Plan and merge overlapping windows");
  window->require_subcommand(1);

  CLI::App* plan = window->add_subcommand(
      "plan", "Print a tokenization, padding or synthesis window plan");
  plan->add_option("--kind", f.kind, "tokenize, padding or synthesis")
      ->check(CLI::IsMember({"tokenize", "padding", "synthesis"}));
  plan->add_option("--length", f.length, "Stream length in frames");
  plan->add_option("--width", f.width, "Window width in frames");
  plan->add_option("--overlap", f.overlap, "Even overlap in frames");
  plan->add_flag("--dataset-mode", f.dataset_mode,
                 "Drop the stream tail before padding");
  plan->add_option("--tail-drop-s", f.tail_drop_s, "Tail dropped in dataset mode");
  plan->add_option("--frame-rate", f.frame_rate, "Frames per second");
  plan->add_option("--continuation-s", f.continuation_s,
                   "Continuation to synthesize");
  plan->add_option("--prompt-s", f.prompt_s, "Speaker prompt per window");
  plan->add_option("--width-s", f.width_s, "Synthesis window length");
  plan->add_option("--overlap-s", f.overlap_s, "Synthesis window overlap");
  plan->add_option("--probe-s", f.probe_s, "Length of listening probes");
  plan->add_option("--out", f.out, "JSON output (default stdout)");
  plan->callback([&run, &f] {
    json j;
    if (f.kind == "tokenize") {
      j = windowing::plan_tokenization_windows(f.length, f.width, f.overlap);
    } else if (f.kind == "padding") {
      windowing::PaddingOptions options;
      options.overlap = f.overlap;
      options.dataset_mode = f.dataset_mode;
      options.tail_drop_seconds = f.tail_drop_s;
      options.frame_rate_hz = f.frame_rate;
      j = windowing::plan_final_window_padding(f.length, f.width, options);
    } else {
      windowing::SynthesisOptions options{f.prompt_s, f.width_s, f.overlap_s,
                                          f.frame_rate};
      const auto synthesis =
          windowing::plan_synthesis_windows(f.continuation_s, options);
      j = synthesis;
      j["probes"] = windowing::boundary_probe_spans(synthesis, f.probe_s);
    }
    run.result = j;
    run.emit(f.out, j.dump(2) + "\n");
  });

  CLI::App* merge = window->add_subcommand(
      "merge", "Merge per-window token records into one stream");
  merge->add_option("--plan", f.plan, "Tokenization or padding plan JSON")
      ->required();
  merge->add_option("--windows", f.windows,
                    "JSON-lines token file, one record per window")
      ->required();
  merge->add_option("--vocab", f.vocab, "Vocabulary size for the output");
  merge->add_option("--out", f.merged, "Output token file")->required();
  merge->callback([&run, &f] {
    json j = parse_json_file(f.plan);
    if (j.contains("pad_length")) j = j.at("windows");
    const auto plan = j.get<windowing::WindowPlan>();
    std::vector<std::vector<TokenId>> windowed;
    double rate = kDefaultFrameRateHz;
    for (TokenStream& s : read_streams(f.windows)) {
      rate = s.frame_rate_hz;
      windowed.push_back(std::move(s.ids));
    }
    TokenStream merged{windowing::merge_windows(windowed, plan), rate};
    write_token_file(f.merged, merged, f.vocab);
    run.primary_output = f.merged;
    run.result = {{"windows", windowed.size()}, {"tokens", merged.size()}};
    run.out << "merged " << windowed.size() << " windows into "
            << merged.size() << " tokens\n";
  });
}

// -------------------------------------------------------------------- eval

struct EvalFlags {
  std::string prompt_text;
  std::string continuation_text;
  std::string generated;
  std::string reference;
  double prompt_s = 10.0;
  double max_s = 240.0;
  double probe_s = 5.0;
  std::string pairs;
  std::string judge = "mock";
  std::string endpoint;
  std::string judge_model;
  std::string api_key_env = "LONGGEN_JUDGE_API_KEY";
  int timeout_ms = 60000;
  std::string text;
  std::vector<std::string> corpus;
  int order = 3;
  double alpha = 1.0;
  std::string out;
};

void add_eval(CLI::App& app, Run& run, EvalFlags& f) {
  CLI::App* eval = app.add_subcommand("eval", "Transcript-level evaluation");
  eval->require_subcommand(1);

  CLI::App* scl = eval->add_subcommand(
      "sc-l", "Prompt similarity of every 100-word continuation segment");
  scl->add_option("--prompt-text", f.prompt_text, "Prompt transcript file")
      ->required();
  scl->add_option("--continuation-text", f.continuation_text,
                  "Continuation transcript file")
      ->required();
  scl->add_option("--out", f.out, "JSON output (default stdout)");
  scl->callback([&run, &f] {
    const evalkit::HashedTrigramEmbedder embedder;
    const evalkit::ScLSeries series = evalkit::sc_l(
        read_file(f.prompt_text), read_file(f.continuation_text), embedder);
    run.result = series;
    run.emit(f.out, run.result.dump(2) + "\n");
  });

  CLI::App* sim = eval->add_subcommand(
      "similarity", "Embedding similarity of a generation to its reference");
  sim->add_option("--generated", f.generated, "Generated transcript file")
      ->required();
  sim->add_option("--reference", f.reference, "Reference transcript file")
      ->required();
  sim->callback([&run, &f] {
    const evalkit::HashedTrigramEmbedder embedder;
    const double score = evalkit::reference_similarity(
        read_file(f.generated), read_file(f.reference), embedder);
    run.result = {{"similarity", score}};
    char line[64];
    std::snprintf(line, sizeof(line), "%.6f\n", score);
    run.out << line;
  });

  CLI::App* strata = eval->add_subcommand(
      "strata", "Minute strata of a generation and one seeded probe each");
  strata->add_option("--prompt-s", f.prompt_s, "Prompt duration");
  strata->add_option("--max-s", f.max_s, "Generation duration");
  strata->add_option("--probe-s", f.probe_s, "Probe length");
  strata->add_option("--out", f.out, "JSON output (default stdout)");
  strata->callback([&run, &f] {
    const auto spans = evalkit::time_strata(f.prompt_s, f.max_s);
    run.result = {
        {"strata", spans},
        {"probes", evalkit::sample_stratum_probes(spans, f.probe_s, run.seed)}};
    run.emit(f.out, run.result.dump(2) + "\n");
  });

  CLI::App* judge = eval->add_subcommand(
      "judge", "Pairwise side-by-side win rate with order flipping");
  judge->add_option("--pairs", f.pairs,
                    "JSON-lines of {id, text_a, text_b}")
      ->required();
  judge->add_option("--judge", f.judge, "mock or http")
      ->check(CLI::IsMember({"mock", "http"}));
  judge->add_option("--endpoint", f.endpoint, "Chat completions URL");
  judge->add_option("--judge-model", f.judge_model, "Judge model name");
  judge->add_option("--api-key-env", f.api_key_env,
                    "Environment variable holding the API key");
  judge->add_option("--timeout-ms", f.timeout_ms, "Per-request timeout");
  judge->add_option("--out", f.out, "Judgment records (JSON-lines)");
  judge->callback([&run, &f] {
    std::vector<evalkit::TranscriptPair> pairs;
    std::istringstream lines(read_file(f.pairs));
    std::string line;
    for (std::size_t n = 1; std::getline(lines, line); ++n) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        const json j = json::parse(line);
        pairs.push_back({j.at("id").is_string()
                             ? j.at("id").get<std::string>()
                             : j.at("id").dump(),
                         j.at("text_a").get<std::string>(),
                         j.at("text_b").get<std::string>()});
      } catch (const json::exception& e) {
        throw InvalidArgument("pair line " + std::to_string(n) + ": " +
                              e.what());
      }
    }
    std::unique_ptr<evalkit::Judge> judge;
    if (f.judge == "mock") {
      judge = std::make_unique<evalkit::MockJudge>();
    } else {
      evalkit::HttpJudgeConfig config;
      config.endpoint = f.endpoint;
      config.model = f.judge_model;
      config.api_key_env = f.api_key_env;
      config.timeout = std::chrono::milliseconds(f.timeout_ms);
      judge = std::make_unique<evalkit::HttpJudge>(config);
    }
    const evalkit::SideBySideResult r =
        evalkit::side_by_side(pairs, *judge, {run.jobs});
    if (!f.out.empty()) {
      std::ostringstream records;
      evalkit::write_judgment_records(records, r.records);
      run.emit(f.out, records.str());
    }
    run.result = {{"judge", judge->name()},
                  {"pairs", pairs.size()},
                  {"judged", r.judged},
                  {"judge_errors", r.judge_errors},
                  {"credit_halves", r.credit_halves},
                  {"win_percent", r.win_percent() ? json(*r.win_percent())
                                                  : json(nullptr)}};
    if (r.judge_errors > 0) {
      run.err << r.judge_errors << " judgments failed\n";
    }
    if (!r.win_percent()) throw JudgeError("no judgment succeeded");
    char text[32];
    std::snprintf(text, sizeof(text), "%.1f\n", *r.win_percent());
    run.out << text;
  });

  CLI::App* ppl = eval->add_subcommand(
      "ngram-ppl", "Per-word log-perplexity under a smoothed n-gram model");
  ppl->add_option("--text", f.text, "Transcript to score")->required();
  ppl->add_option("--corpus", f.corpus, "Training documents, one per file")
      ->required();
  ppl->add_option("--order", f.order, "n-gram order");
  ppl->add_option("--alpha", f.alpha, "Additive smoothing");
  ppl->callback([&run, &f] {
    std::vector<std::string> docs;
    for (const std::string& path : f.corpus) docs.push_back(read_file(path));
    const double value =
        evalkit::ngram_ppl(read_file(f.text), f.order, docs, f.alpha);
    run.result = {{"log_perplexity", value}};
    char line[64];
    std::snprintf(line, sizeof(line), "%.6f\n", value);
    run.out << line;
  });
}

// ----------------------------------------------------------------- dataset

struct DatasetFlags {
  std::string manifest;
  double target_s = dataset::kDefaultTargetSeconds;
  std::vector<std::string> splits;
  std::string spans;
  double prompt_s = 10.0;
  double min_s = 240.0;
  double frame_rate = kDefaultFrameRateHz;
  std::string out;
};

dataset::SpanManifest read_spans_file(const std::string& path) {
  std::istringstream in(read_file(path));
  return dataset::read_spans_jsonl(in);
}

void add_dataset(CLI::App& app, Run& run, DatasetFlags& f) {
  CLI::App* ds = app.add_subcommand("dataset", "Build long-form splits");
  ds->require_subcommand(1);

  CLI::App* agg = ds->add_subcommand(
      "agglomerate", "Pack consecutive utterances into long spans");
  agg->add_option("--manifest", f.manifest, "Utterance manifest (.csv or .jsonl)")
      ->required();
  agg->add_option("--target-s", f.target_s, "Longest span of speech");
  agg->add_option("--out", f.out, "Span JSON-lines (default stdout)");
  agg->callback([&run, &f] {
    const auto spans = dataset::agglomerate(
        dataset::read_manifest_file(f.manifest), f.target_s, run.jobs);
    std::ostringstream text;
    dataset::write_spans_jsonl(text, spans);
    run.emit(f.out, text.str());
    run.result = {{"spans", spans.size()}, {"stats", dataset::split_stats(spans)}};
    if (!f.out.empty()) run.out << spans.size() << " spans\n";
  });

  CLI::App* stats = ds->add_subcommand("stats", "Summary table of span files");
  stats->add_option("--split", f.splits, "name=spans.jsonl, repeatable")
      ->required();
  stats->add_option("--out", f.out, "Table output (default stdout)");
  stats->callback([&run, &f] {
    std::vector<std::pair<std::string, dataset::SplitStats>> rows;
    for (const std::string& split : f.splits) {
      const auto eq = split.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw InvalidArgument("--split expects name=path, got '" + split + "'");
      }
      rows.emplace_back(split.substr(0, eq),
                        dataset::split_stats(read_spans_file(split.substr(eq + 1))));
      run.result[rows.back().first] = rows.back().second;
    }
    run.emit(f.out, dataset::format_stats_table(rows));
  });

  CLI::App* pairs = ds->add_subcommand(
      "pairs", "Prompt/reference pairs from spans long enough to evaluate");
  pairs->add_option("--spans", f.spans, "Span JSON-lines")->required();
  pairs->add_option("--prompt-s", f.prompt_s, "Prompt duration");
  pairs->add_option("--min-s", f.min_s, "Shortest span kept");
  pairs->add_option("--frame-rate", f.frame_rate, "Frames per second");
  pairs->add_option("--out", f.out, "Pair JSON-lines (default stdout)");
  pairs->callback([&run, &f] {
    const auto result = dataset::make_eval_pairs(
        read_spans_file(f.spans), f.prompt_s, f.min_s, f.frame_rate);
    std::ostringstream text;
    for (const auto& p : result) text << json(p).dump() << '\n';
    run.emit(f.out, text.str());
    run.result = {{"pairs", result.size()}};
  });
}

// ------------------------------------------------------------------- bench

struct BenchFlags {
  std::vector<std::string> models = {"builtin:bench",
                                     "builtin:bench-transformer"};
  std::uint64_t model_seed = 0;
  std::vector<std::int64_t> positions = {1024, 4096, 16384};
  int warmup = 3;
  int repeats = 21;
  std::vector<std::int64_t> lengths = {1024, 4096, 16384};
  std::size_t budget_bytes = 32u << 20;
  int samples = 5;
  std::int64_t max_batch = 4096;
  std::string out;
  std::string csv;
  std::string svg;
};

void add_bench(CLI::App& app, Run& run, BenchFlags& f) {
  CLI::App* b = app.add_subcommand("bench", "Decoding efficiency measurements");
  b->require_subcommand(1);

  auto common = [&f](CLI::App* sub) {
    sub->add_option("--model", f.models, "Models to measure, repeatable");
    sub->add_option("--model-seed", f.model_seed, "Weight seed");
    sub->add_option("--repeats", f.repeats, "Timed repeats per point");
    sub->add_option("--out", f.out, "JSON report (default stdout)");
    sub->add_option("--csv", f.csv, "Also write a CSV table");
    sub->add_option("--svg", f.svg, "Also write an SVG chart");
  };
  auto finish = [&run, &f](std::vector<bench::BenchReport>& reports) {
    run.result = {{"reports", reports}};
    if (!f.csv.empty()) {
      std::ostringstream csv;
      bench::write_report_csv(csv, reports);
      write_file_atomic(f.csv, csv.str());
    }
    if (!f.svg.empty()) {
      write_file_atomic(f.svg, bench::render_report_svg(reports));
    }
    run.emit(f.out, json(reports).dump(2) + "\n");
  };

  CLI::App* lat = b->add_subcommand("latency", "Per-step latency by position");
  common(lat);
  lat->add_option("--positions", f.positions, "Probe positions");
  lat->add_option("--warmup", f.warmup, "Discarded steps per position");
  lat->callback([&run, &f, finish] {
    std::vector<bench::BenchReport> reports;
    for (const std::string& ref : f.models) {
      const auto model = load_model(ref, f.model_seed);
      bench::BenchReport r;
      r.model_id = ref;
      r.seed = run.seed;
      r.machine = bench::describe_machine();
      r.latency = bench::measure_step_latency(
          *model, {f.positions, f.warmup, f.repeats, run.seed});
      reports.push_back(std::move(r));
    }
    finish(reports);
  });

  CLI::App* thr = b->add_subcommand(
      "throughput", "Tokens/s at the largest batch a memory budget allows");
  common(thr);
  thr->add_option("--lengths", f.lengths, "Target lengths");
  thr->add_option("--budget-bytes", f.budget_bytes, "Decoding state budget");
  thr->add_option("--samples", f.samples, "Positions timed per length");
  thr->add_option("--max-batch", f.max_batch, "Largest batch considered");
  thr->callback([&run, &f, finish] {
    std::vector<bench::BenchReport> reports;
    for (const std::string& ref : f.models) {
      const auto model = load_model(ref, f.model_seed);
      bench::BenchReport r;
      r.model_id = ref;
      r.seed = run.seed;
      r.memory_budget_bytes = f.budget_bytes;
      r.machine = bench::describe_machine();
      bench::ThroughputOptions options;
      options.memory_budget_bytes = f.budget_bytes;
      options.samples = f.samples;
      options.repeats = f.repeats;
      options.max_batch = f.max_batch;
      options.seed = run.seed;
      for (std::int64_t len : f.lengths) {
        r.throughput.push_back(bench::measure_throughput(*model, len, options));
      }
      reports.push_back(std::move(r));
    }
    finish(reports);
  });
}

// ----------------------------------------------------------------- weights

struct WeightsFlags {
  std::string preset = "desk";
  std::string model_config;
  std::string out;
  std::string archive;
};

void add_weights(CLI::App& app, Run& run, WeightsFlags& f) {
  CLI::App* w = app.add_subcommand("weights", "Create and inspect weight archives");
  w->require_subcommand(1);

  CLI::App* init = w->add_subcommand("init", "Write randomly initialized weights");
  init->add_option("--preset", f.preset,
                   "desk, desk-transformer, bench or bench-transformer");
  init->add_option("--model-config", f.model_config,
                   "ModelConfig JSON, overrides --preset");
  init->add_option("--out", f.out, "Archive path")->required();
  init->callback([&run, &f] {
    ModelConfig config = f.model_config.empty()
                             ? preset_config(f.preset)
                             : parse_json_file(f.model_config).get<ModelConfig>();
    config.seed = run.seed;
    config.validate();
    const ParameterSet params = init_random_weights(config, run.seed);
    save_weights(f.out, config, params);
    run.primary_output = f.out;
    run.result = {{"config", config},
                  {"tensors", params.size()},
                  {"bytes", params.total_bytes()}};
    run.out << "wrote " << params.size() << " tensors ("
            << params.total_bytes() << " bytes) to " << f.out << '\n';
  });

  CLI::App* inspect = w->add_subcommand("inspect", "Describe and verify an archive");
  inspect->add_option("--archive", f.archive, "Archive path")->required();
  inspect->callback([&run, &f] {
    const WeightArchive archive = read_weight_archive_file(f.archive);
    json tensors = json::array();
    for (const auto& e : archive.header) {
      tensors.push_back({{"name", e.name},
                         {"shape", e.shape},
                         {"dtype", e.dtype},
                         {"byte_offset", e.byte_offset}});
    }
    json j = {{"tensors", tensors}, {"payload_bytes", archive.payload.size()}};
    if (archive.config) {
      load_weights(archive, *archive.config);
      j["config"] = *archive.config;
      j["verified"] = true;
    } else {
      j["verified"] = false;
    }
    run.result = j;
    run.out << j.dump(2) << '\n';
  });
}

int run_app(const std::vector<std::string>& argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Long-form token generation, windowing, evaluation and "
               "benchmark toolkit",
               "longgen"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file of option values; flags win");

  Run run(out, err);
  app.add_option("--seed", run.seed, "Seed for sampling and sampling-like choices");
  app.add_option("--jobs", run.jobs, "Worker threads for per-example work")
      ->check(CLI::PositiveNumber);
  app.add_option("--sidecar", run.sidecar,
                 "Run record path (default <output>.run.json)");

  GenerateFlags generate;
  GenerateFlags extend;
  ScoreFlags score;
  WindowFlags window;
  EvalFlags eval;
  DatasetFlags ds;
  BenchFlags bench_flags;
  WeightsFlags weights;
  add_generate(app, run, generate, longform::GenerationMode::kSingleSession);
  add_generate(app, run, extend, longform::GenerationMode::kSlideAndPrompt);
  add_score(app, run, score);
  add_window(app, run, window);
  add_eval(app, run, eval);
  add_dataset(app, run, ds);
  add_bench(app, run, bench_flags);
  add_weights(app, run, weights);

  std::vector<const char*> raw;
  raw.reserve(argv.size());
  for (const std::string& a : argv) raw.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* leaf = selected_command(app).first;
    err << leaf->help();
    return 2;
  }

  const std::string command = selected_command(app).second;
  std::string sidecar = run.sidecar;
  if (sidecar.empty()) {
    if (!run.primary_output.empty()) {
      sidecar = run.primary_output + ".run.json";
    } else {
      std::string name = command;
      std::replace(name.begin(), name.end(), ' ', '-');
      sidecar = "longgen-" + name + ".run.json";
    }
  }
  const json record = {{"command", command},
                       {"argv", json(std::vector<std::string>(argv.begin() + 1,
                                                              argv.end()))},
                       {"seed", run.seed},
                       {"config", resolved_options(app)},
                       {"result", run.result}};
  write_file_atomic(sidecar, record.dump(2) + "\n");
  return 0;
}

}  // namespace

std::unique_ptr<decoder::SequenceModel> load_model(const std::string& ref,
                                                   std::uint64_t model_seed) {
  constexpr std::string_view kBuiltin = "builtin:";
  if (ref.rfind(kBuiltin, 0) == 0) {
    const std::string preset = ref.substr(kBuiltin.size());
    const ModelConfig config = preset_config(preset);
    return std::make_unique<decoder::NeuralModel>(
        config, init_random_weights(config, model_seed));
  }
  if (has_extension(ref, ".json")) {
    const json spec = parse_json_file(ref);
    const std::string type = spec.value("type", "");
    if (type == "scripted") {
      return std::make_unique<decoder::ScriptedModel>(
          decoder::ScriptedModel::from_json(spec));
    }
    if (type == "neural") {
      ModelConfig config;
      try {
        config = spec.at("config").get<ModelConfig>();
      } catch (const json::exception& e) {
        throw InvalidArgument(std::string("neural model spec: ") + e.what());
      }
      const std::uint64_t seed = spec.value("seed", model_seed);
      return std::make_unique<decoder::NeuralModel>(
          config, init_random_weights(config, seed));
    }
    throw InvalidArgument("model spec '" + ref +
                          "' needs \"type\": \"scripted\" or \"neural\"");
  }
  const WeightArchive archive = read_weight_archive_file(ref);
  if (!archive.config) {
    throw SchemaError("weight archive '" + ref + "' carries no model config");
  }
  return std::make_unique<decoder::NeuralModel>(
      *archive.config, load_weights(archive, *archive.config));
}

int cli_dispatch(const std::vector<std::string>& argv, std::ostream& out,
                 std::ostream& err) {
  try {
    return run_app(argv, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const RuntimeFailure& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed JSON input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cli_dispatch(int argc, const char* const* argv) {
  return cli_dispatch(std::vector<std::string>(argv, argv + argc), std::cout,
                      std::cerr);
}

}  // namespace longgen::cli
