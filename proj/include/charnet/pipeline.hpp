// Copyright 2026 The charnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// File-based pipeline stages behind the command-line tool. Each stage reads
// its predecessors' files, writes its own outputs under `out`, and puts a
// `<file>.meta.json` sidecar next to every output recording the stage name,
// the effective options and their hash. Nothing here reads the clock.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace charnet::pipeline {

namespace fs = std::filesystem;

/// 64-bit FNV-1a over the compact JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

struct StageResult {
  std::string stage;
  std::vector<fs::path> outputs;
  std::string config_hash;
};

/// Writes `content` to `path` and the sidecar `path.meta.json`.
void write_artifact(const fs::path& path, const std::string& content, const std::string& stage,
                    const nlohmann::json& options, StageResult& result);

struct IngestOptions {
  fs::path manifest;
  std::optional<fs::path> aliases;  ///< hyphenated aliases stay single tokens
  std::optional<std::string> chapter_delimiter;
  fs::path out;
};
/// -> corpus.json
StageResult ingest(const IngestOptions& o);

struct MentionsOptions {
  fs::path corpus;
  fs::path aliases;
  fs::path out;
};
/// -> mentions.csv, mention_counts.json, labels.json
StageResult mentions(const MentionsOptions& o);

struct ChartOptions {
  fs::path corpus;
  fs::path mentions;
  fs::path aliases;
  std::vector<std::string> characters;  ///< empty: every canonical id with a mention
  std::optional<std::string> work;
  fs::path out;
};
/// -> chart.csv
StageResult chart(const ChartOptions& o);

struct ExtractOptions {
  fs::path corpus;
  fs::path mentions;
  std::string strategy = "sentence";
  std::size_t window_chars = 2000;
  bool count_instances = false;
  fs::path out;
};
/// -> edges.csv
StageResult extract(const ExtractOptions& o);

struct GraphOptions {
  fs::path edges;
  std::uint64_t seed = 1;
  std::size_t layout_iterations = 500;
  std::size_t top_k = 10;
  fs::path out;
};
/// -> graph.graphml, metrics.json, layout.csv, centrality.csv
StageResult graph(const GraphOptions& o);

struct EmbedOptions {
  std::string method;  ///< word, node2vec, le
  std::optional<fs::path> corpus;
  std::optional<fs::path> mentions;
  std::optional<fs::path> graph;
  std::size_t dims = 20;
  double p = 1.0;
  double q = 1.0;
  std::size_t epochs = 5;
  double lr = 0.025;
  std::size_t window = 0;     ///< 0: method default
  std::size_t min_count = 5;  ///< word vectors only
  std::size_t walks_per_node = 10;
  std::size_t walk_length = 80;
  bool weighted = false;
  std::uint64_t seed = 1;
  fs::path out;
};
/// -> embedding_<method>.csv, embedding_<method>.json (provenance sidecar),
/// embedding_<method>_2d.csv
StageResult embed(const EmbedOptions& o);

struct TrainOptions {
  std::string task;  ///< classify, linkpred
  fs::path graph;
  std::optional<fs::path> labels;
  std::optional<fs::path> features;  ///< embedding CSV; one-hot when absent
  std::string model = "gcn";
  std::optional<std::size_t> epochs;
  std::optional<double> lr;
  std::size_t hidden = 20;
  std::size_t dims = 20;
  double holdout = 0.1;
  bool weighted = false;
  std::uint64_t seed = 1;
  fs::path out;
};
/// classify -> predictions.csv, model.json, hidden.csv, loss.csv
/// linkpred -> link_scores.csv, linkpred.json, model.json, loss.csv
StageResult train(const TrainOptions& o);

struct EvaluateOptions {
  fs::path config;
  std::optional<std::uint64_t> seed;
  fs::path out;
};
/// -> results.csv, reports.json
StageResult evaluate(const EvaluateOptions& o);

struct FixtureOptions {
  std::uint64_t seed = 2024;
  fs::path out;
};
/// -> benchmark/graph.graphml, benchmark/edges.csv, benchmark/labels.json,
/// context/manifest.json, context/context.txt, context/aliases.tsv
StageResult fixture(const FixtureOptions& o);

}  // namespace charnet::pipeline
