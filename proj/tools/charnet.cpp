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

// charnet command-line entry point. Exit status: 0 on success, 1 when a stage
// fails (the stage is named on stderr), 2 for usage errors.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "charnet/common.hpp"
#include "charnet/pipeline.hpp"

namespace pl = charnet::pipeline;
using nlohmann::json;

namespace {

constexpr int kUsage = 2;
constexpr int kStageFailure = 1;

std::string key_of(const CLI::Option* opt) {
  std::string name = opt->get_lnames().empty() ? std::string() : opt->get_lnames().front();
  for (auto& c : name)
    if (c == '-') c = '_';
  return name;
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

// Options left unset on the command line take their value from the config
// file: first the section named after the subcommand, then the top level.
void apply_config(CLI::App* sub, const json& config) {
  json merged = json::object();
  for (auto it = config.begin(); it != config.end(); ++it)
    if (!it.value().is_object()) merged[it.key()] = it.value();
  if (config.contains(sub->get_name()) && config[sub->get_name()].is_object())
    merged.update(config[sub->get_name()]);
  for (CLI::Option* opt : sub->get_options()) {
    const std::string key = key_of(opt);
    if (key.empty() || key == "config" || key == "help" || opt->count() > 0 || !merged.contains(key)) continue;
    const json& v = merged[key];
    if (v.is_array()) {
      for (const auto& x : v) opt->add_result(scalar_text(x));
    } else {
      opt->add_result(scalar_text(v));
    }
    opt->run_callback();
  }
}

void report(const pl::StageResult& r) {
  for (const auto& p : r.outputs) std::cout << p.generic_string() << "\n";
  std::cerr << r.stage << ": wrote " << r.outputs.size() << " files (config " << r.config_hash << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"charnet: character networks from novels, with graph embeddings and GNN evaluation"};
  app.name("charnet");
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file supplying defaults for any option")->check(CLI::ExistingFile);

  auto add_out = [](CLI::App* s, pl::fs::path& out) { s->add_option("--out", out, "Output directory")->required(); };

  pl::IngestOptions ingest;
  auto* s_ingest = app.add_subcommand("ingest", "Tokenize and segment the works listed in a manifest");
  s_ingest->add_option("--manifest", ingest.manifest, "Manifest JSON")->required();
  s_ingest->add_option("--aliases", ingest.aliases, "Alias table; hyphenated aliases stay one token");
  s_ingest->add_option("--chapter-delimiter", ingest.chapter_delimiter, "Regex matched per line");
  add_out(s_ingest, ingest.out);

  pl::MentionsOptions mentions;
  auto* s_mentions = app.add_subcommand("mentions", "Resolve named mentions and derive work labels");
  s_mentions->add_option("--corpus", mentions.corpus, "corpus.json")->required();
  s_mentions->add_option("--aliases", mentions.aliases, "Alias table (TSV or JSON)")->required();
  add_out(s_mentions, mentions.out);

  pl::ChartOptions chart;
  auto* s_chart = app.add_subcommand("chart", "Narrative chart of relative mention frequency per chapter");
  s_chart->add_option("--corpus", chart.corpus, "corpus.json")->required();
  s_chart->add_option("--mentions", chart.mentions, "mentions.csv")->required();
  s_chart->add_option("--aliases", chart.aliases, "Alias table")->required();
  s_chart->add_option("--characters", chart.characters, "Canonical ids, in row order")->delimiter(',');
  s_chart->add_option("--work", chart.work, "Restrict to one work");
  add_out(s_chart, chart.out);

  pl::ExtractOptions extract;
  auto* s_extract = app.add_subcommand("extract", "Co-occurrence edge list");
  s_extract->add_option("--corpus", extract.corpus, "corpus.json")->required();
  s_extract->add_option("--mentions", extract.mentions, "mentions.csv")->required();
  s_extract->add_option("--strategy", extract.strategy, "sentence or window")
      ->check(CLI::IsMember({"sentence", "window"}));
  s_extract->add_option("--window-chars", extract.window_chars, "Window size in characters")
      ->check(CLI::PositiveNumber);
  s_extract->add_flag("--instances", extract.count_instances, "Sentence mode: count mention-instance pairs");
  add_out(s_extract, extract.out);

  pl::GraphOptions graph;
  auto* s_graph = app.add_subcommand("graph", "Build the graph, metrics and layout");
  s_graph->add_option("--edges", graph.edges, "edges.csv")->required();
  s_graph->add_option("--seed", graph.seed, "Layout seed");
  s_graph->add_option("--iterations", graph.layout_iterations, "Layout iterations");
  s_graph->add_option("--top-k", graph.top_k, "Length of centrality rankings");
  // Accepted for symmetry with extract; the strategy is fixed by the edge list.
  std::string graph_strategy;
  s_graph->add_option("--strategy", graph_strategy, "Ignored; kept for pipeline configs")
      ->check(CLI::IsMember({"sentence", "window"}));
  add_out(s_graph, graph.out);

  pl::EmbedOptions embed;
  auto* s_embed = app.add_subcommand("embed", "Word, node2vec or Laplacian Eigenmap vectors");
  s_embed->add_option("method", embed.method, "word | node2vec | le")
      ->required()
      ->check(CLI::IsMember({"word", "node2vec", "le"}));
  s_embed->add_option("--corpus", embed.corpus, "corpus.json (word)");
  s_embed->add_option("--mentions", embed.mentions, "mentions.csv (word)");
  s_embed->add_option("--graph", embed.graph, "graph.graphml (node2vec, le)");
  s_embed->add_option("--dims", embed.dims, "Embedding dimension")->check(CLI::PositiveNumber);
  s_embed->add_option("--p", embed.p, "node2vec return parameter");
  s_embed->add_option("--q", embed.q, "node2vec in-out parameter");
  s_embed->add_option("--epochs", embed.epochs, "Skipgram epochs");
  s_embed->add_option("--lr", embed.lr, "Initial learning rate");
  s_embed->add_option("--window", embed.window, "Context window");
  s_embed->add_option("--min-count", embed.min_count, "Word vectors: minimum count");
  s_embed->add_option("--walks-per-node", embed.walks_per_node, "node2vec walks per node");
  s_embed->add_option("--walk-length", embed.walk_length, "node2vec walk length");
  s_embed->add_flag("--weighted", embed.weighted, "Use co-occurrence weights");
  s_embed->add_option("--seed", embed.seed, "Seed");
  add_out(s_embed, embed.out);

  pl::TrainOptions train;
  auto* s_train = app.add_subcommand("train", "Train a GCN or GAT");
  s_train->add_option("task", train.task, "classify | linkpred")
      ->required()
      ->check(CLI::IsMember({"classify", "linkpred"}));
  s_train->add_option("--graph", train.graph, "graph.graphml")->required();
  s_train->add_option("--labels", train.labels, "labels.json (classify)");
  s_train->add_option("--features", train.features, "Embedding CSV; one-hot when omitted");
  s_train->add_option("--model", train.model, "gcn or gat")->check(CLI::IsMember({"gcn", "gat"}));
  s_train->add_option("--epochs", train.epochs, "Epochs");
  s_train->add_option("--lr", train.lr, "Adam learning rate");
  s_train->add_option("--hidden", train.hidden, "Hidden width");
  s_train->add_option("--dims", train.dims, "Output width for link prediction");
  s_train->add_option("--holdout", train.holdout, "Held-out edge fraction (linkpred)");
  s_train->add_flag("--weighted", train.weighted, "Use co-occurrence weights");
  s_train->add_option("--seed", train.seed, "Seed");
  add_out(s_train, train.out);

  pl::EvaluateOptions evaluate;
  std::uint64_t eval_seed = 0;
  auto* s_eval = app.add_subcommand("evaluate", "Run an experiment grid");
  s_eval->add_option("--config", evaluate.config, "Experiment JSON")->required()->check(CLI::ExistingFile);
  auto* eval_seed_opt = s_eval->add_option("--seed", eval_seed, "Override the experiment seed");
  add_out(s_eval, evaluate.out);

  pl::FixtureOptions fixture;
  auto* s_fixture = app.add_subcommand("fixture", "Write the planted-partition benchmark and context corpus");
  s_fixture->add_option("--seed", fixture.seed, "Benchmark seed");
  add_out(s_fixture, fixture.out);

  if (argc <= 1) {
    std::cerr << app.help();
    return kUsage;
  }
  // Required options may come from --config, so requirements are checked after
  // the config is applied.
  std::vector<CLI::Option*> required;
  for (CLI::App* sub : app.get_subcommands({}))
    for (CLI::Option* opt : sub->get_options())
      if (opt->get_required() && sub != s_eval && opt->get_positional() == false) {
        opt->required(false);
        required.push_back(opt);
      }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  CLI::App* sub = app.get_subcommands().front();
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      apply_config(sub, json::parse(in));
    }
  } catch (const std::exception& e) {
    std::cerr << "charnet: cannot apply config " << config_path << ": " << e.what() << "\n";
    return kUsage;
  }
  for (CLI::Option* opt : required) {
    bool mine = false;
    for (CLI::Option* o : sub->get_options())
      if (o == opt) mine = true;
    if (mine && opt->count() == 0) {
      std::cerr << "charnet " << sub->get_name() << ": " << opt->get_name() << " is required\n"
                << sub->help();
      return kUsage;
    }
  }

  const std::string stage = sub->get_name();
  try {
    pl::StageResult r;
    if (sub == s_ingest) r = pl::ingest(ingest);
    else if (sub == s_mentions) r = pl::mentions(mentions);
    else if (sub == s_chart) r = pl::chart(chart);
    else if (sub == s_extract) r = pl::extract(extract);
    else if (sub == s_graph) r = pl::graph(graph);
    else if (sub == s_embed) r = pl::embed(embed);
    else if (sub == s_train) r = pl::train(train);
    else if (sub == s_eval) {
      if (eval_seed_opt->count()) evaluate.seed = eval_seed;
      r = pl::evaluate(evaluate);
    } else r = pl::fixture(fixture);
    report(r);
  } catch (const std::exception& e) {
    std::cerr << "charnet: stage '" << stage << "' failed: " << e.what() << "\n";
    return kStageFailure;
  }
  return 0;
}
