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

#include "charnet/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "charnet/characters.hpp"
#include "charnet/cooccur.hpp"
#include "charnet/corpus.hpp"
#include "charnet/csv.hpp"
#include "charnet/embed.hpp"
#include "charnet/eval.hpp"
#include "charnet/gnn.hpp"
#include "charnet/graph.hpp"

namespace charnet::pipeline {

using nlohmann::json;

std::string config_hash(const json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_artifact(const fs::path& path, const std::string& content, const std::string& stage, const json& options,
                    StageResult& result) {
  csv::write_file(path, content);
  const json meta = {{"stage", stage}, {"config_hash", config_hash(options)}, {"config", options}};
  csv::write_file(fs::path(path.string() + ".meta.json"), meta.dump(2) + "\n");
  result.outputs.push_back(path);
  result.config_hash = config_hash(options);
}

namespace {

std::string opt_path(const std::optional<fs::path>& p) { return p ? p->generic_string() : std::string(); }

std::string read_input(const fs::path& path, const std::string& stage) {
  if (!fs::exists(path)) throw InputError("missing input '" + path.string() + "': run `charnet " + stage + "` first");
  return csv::read_file(path);
}

json read_json(const fs::path& path, const std::string& stage) {
  try {
    return json::parse(read_input(path, stage));
  } catch (const json::exception& e) {
    throw InputError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

TokenizedCorpus load_corpus_file(const fs::path& p) { return corpus_from_json(read_json(p, "ingest")); }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

StageResult start(const std::string& stage) {
  StageResult r;
  r.stage = stage;
  return r;
}

Matrix load_features(const CharacterGraph& g, const std::optional<fs::path>& path, std::vector<std::string>& missing) {
  if (!path) return one_hot_features(g.node_count());
  const auto e = embedding_from_csv(read_input(*path, "embed"), Provenance::word_context);
  return aligned_features(g, e, &missing);
}

}  // namespace

StageResult ingest(const IngestOptions& o) {
  const json opts = {{"manifest", o.manifest.generic_string()},
                     {"aliases", opt_path(o.aliases)},
                     {"chapter_delimiter", o.chapter_delimiter.value_or("")}};
  SegmentationConfig seg;
  if (o.aliases) seg.tokenizer.keep_together = alias_keep_together(read_alias_file(*o.aliases));
  if (o.chapter_delimiter) seg.chapter_delimiter = *o.chapter_delimiter;
  const auto corpus = load_corpus(read_manifest(o.manifest), seg);
  auto r = start("ingest");
  write_artifact(o.out / "corpus.json", corpus_to_json(corpus).dump() + "\n", r.stage, opts, r);
  return r;
}

StageResult mentions(const MentionsOptions& o) {
  const json opts = {{"corpus", o.corpus.generic_string()}, {"aliases", o.aliases.generic_string()}};
  const auto corpus = load_corpus_file(o.corpus);
  const auto raw = read_alias_file(o.aliases);
  TokenizerConfig tok;
  tok.keep_together = alias_keep_together(raw);
  const auto aliases = compile_alias_table(raw, tok);
  const auto found = extract_mentions(corpus, aliases);
  const auto stats = count_mention_types(corpus, aliases);
  const auto by_work = mention_counts_by_work(corpus, found);

  json per_work = json::object();
  for (const auto& [work, s] : stats) {
    per_work[work] = {{"tokens", s.token_count},
                      {"named_mentions", s.explicit_named_mentions},
                      {"pronouns", s.pronoun_token_count},
                      {"cooccurrences", s.cooccurrence_count}};
    if (s.nominal_mention_count) per_work[work]["nominal_mentions"] = *s.nominal_mention_count;
  }
  const json counts = {{"works", per_work}, {"characters", by_work}};
  std::vector<std::string> characters;
  for (const auto& [c, _] : by_work) characters.push_back(c);
  const auto labels = derive_labels(by_work, corpus.works, characters);

  auto r = start("mentions");
  write_artifact(o.out / "mentions.csv", mentions_to_csv(corpus, found), r.stage, opts, r);
  write_artifact(o.out / "mention_counts.json", dump(counts), r.stage, opts, r);
  write_artifact(o.out / "labels.json", dump(labels_to_json(labels)), r.stage, opts, r);
  return r;
}

StageResult chart(const ChartOptions& o) {
  const json opts = {{"corpus", o.corpus.generic_string()},   {"mentions", o.mentions.generic_string()},
                     {"aliases", o.aliases.generic_string()}, {"characters", o.characters},
                     {"work", o.work.value_or("")}};
  const auto corpus = load_corpus_file(o.corpus);
  const auto found = mentions_from_csv(read_input(o.mentions, "mentions"), corpus);
  const auto raw = read_alias_file(o.aliases);
  TokenizerConfig tok;
  tok.keep_together = alias_keep_together(raw);
  const auto aliases = compile_alias_table(raw, tok);
  std::vector<std::string> keys = o.characters;
  if (keys.empty()) {
    std::set<std::string> seen;
    for (const auto& m : found)
      if (!m.in_dialogue) seen.insert(m.canonical_id);
    keys.assign(seen.begin(), seen.end());
  }
  const auto c = narrative_chart(found, keys, corpus, aliases, o.work);
  auto r = start("chart");
  write_artifact(o.out / "chart.csv", narrative_chart_to_csv(c), r.stage, opts, r);
  return r;
}

StageResult extract(const ExtractOptions& o) {
  const json opts = {{"corpus", o.corpus.generic_string()},
                     {"mentions", o.mentions.generic_string()},
                     {"strategy", o.strategy},
                     {"window_chars", o.strategy == "window" ? o.window_chars : 0},
                     {"count_instances", o.count_instances}};
  const auto corpus = load_corpus_file(o.corpus);
  const auto found = mentions_from_csv(read_input(o.mentions, "mentions"), corpus);
  const auto strategy = strategy_from_string(o.strategy);
  const EdgeList edges =
      strategy == CooccurrenceStrategy::sentence
          ? sentence_cooccurrences(found, corpus,
                                   o.count_instances ? SentenceMultiplicity::instances : SentenceMultiplicity::once)
          : window_cooccurrences(found, corpus, o.window_chars);
  auto r = start("extract");
  write_artifact(o.out / "edges.csv", edges_to_csv(edges), r.stage, opts, r);
  return r;
}

StageResult graph(const GraphOptions& o) {
  const json opts = {{"edges", o.edges.generic_string()},
                     {"seed", o.seed},
                     {"layout_iterations", o.layout_iterations},
                     {"top_k", o.top_k}};
  const auto g = build_graph(edges_from_csv(read_input(o.edges, "extract")));
  json metrics = {{"nodes", g.node_count()}, {"edges", g.edge_count()}};
  if (g.node_count() >= 2) {
    metrics["density"] = density(g);
    metrics["undirected_density"] = undirected_density(g);
  }
  if (g.node_count() >= 1) {
    metrics["mean_degree"] = mean_degree(g);
    const auto comps = connected_components(g);
    metrics["components"] = comps.size();
    const auto sp = shortest_path_stats(g);
    metrics["diameter"] = sp.diameter;
    metrics["avg_shortest_path"] = sp.avg_shortest_path;
    metrics["largest_component_only"] = sp.largest_component_only;
    metrics["largest_component_size"] = sp.component_size;
    const std::size_t k = std::min(o.top_k, g.node_count());
    metrics["top_degree"] = rank_centrality(g, CentralityMeasure::degree, k);
    metrics["top_betweenness"] = rank_centrality(g, CentralityMeasure::betweenness, k);
  }
  std::string centrality = "node,degree,betweenness,betweenness_normalized\n";
  if (g.node_count() >= 1) {
    const auto b = betweenness(g);
    for (std::size_t i = 0; i < g.node_count(); ++i)
      centrality += csv::join({g.node(i), std::to_string(g.neighbors(i).size()), csv::format_double(b.raw[i]),
                               csv::format_double(b.normalized[i])}) +
                    "\n";
  }
  LayoutConfig lc;
  lc.seed = o.seed;
  lc.iterations = o.layout_iterations;
  auto r = start("graph");
  write_artifact(o.out / "graph.graphml", to_graphml(g), r.stage, opts, r);
  write_artifact(o.out / "metrics.json", dump(metrics), r.stage, opts, r);
  write_artifact(o.out / "centrality.csv", centrality, r.stage, opts, r);
  if (g.node_count() >= 1) write_artifact(o.out / "layout.csv", layout_to_csv(g, layout_fr(g, lc)), r.stage, opts, r);
  return r;
}

StageResult embed(const EmbedOptions& o) {
  json opts = {{"method", o.method},   {"corpus", opt_path(o.corpus)}, {"mentions", opt_path(o.mentions)},
               {"graph", opt_path(o.graph)}, {"dims", o.dims},       {"seed", o.seed}};
  EmbeddingMatrix e;
  if (o.method == "word") {
    if (!o.corpus || !o.mentions) throw InputError("word vectors need --corpus and --mentions");
    const auto corpus = load_corpus_file(*o.corpus);
    const auto found = mentions_from_csv(read_input(*o.mentions, "mentions"), corpus);
    WordEmbeddingConfig c;
    c.dim = o.dims;
    c.epochs = o.epochs;
    c.learning_rate = o.lr;
    c.min_count = o.min_count;
    if (o.window) c.window = o.window;
    c.seed = o.seed;
    opts.update({{"epochs", c.epochs}, {"lr", c.learning_rate}, {"window", c.window}, {"min_count", c.min_count}});
    e = word_embeddings(corpus, found, c).embedding;
  } else if (o.method == "node2vec" || o.method == "le") {
    if (!o.graph) throw InputError(o.method + " needs --graph");
    const auto g = from_graphml(read_input(*o.graph, "graph"));
    if (o.method == "node2vec") {
      Node2VecConfig c;
      c.dim = o.dims;
      c.epochs = o.epochs;
      c.learning_rate = o.lr;
      if (o.window) c.window = o.window;
      c.walk.p = o.p;
      c.walk.q = o.q;
      c.walk.walks_per_node = o.walks_per_node;
      c.walk.walk_length = o.walk_length;
      c.walk.weighted = o.weighted;
      c.walk.seed = o.seed;
      opts.update({{"p", o.p}, {"q", o.q}, {"epochs", c.epochs}, {"lr", c.learning_rate}, {"window", c.window},
                   {"walks_per_node", o.walks_per_node}, {"walk_length", o.walk_length}, {"weighted", o.weighted}});
      e = node2vec(g, c).embedding;
    } else {
      opts.update({{"weighted", o.weighted}});
      e = laplacian_eigenmap(g, o.dims, o.weighted).embedding;
    }
  } else {
    throw InputError("unknown embedding method '" + o.method + "' (expected word, node2vec or le)");
  }
  std::string plot = "entity_id,x,y\n";
  const auto pts = project_2d(e);
  for (std::size_t i = 0; i < pts.size(); ++i)
    plot += csv::join({e.entity_ids[i], csv::format_double(pts[i].x), csv::format_double(pts[i].y)}) + "\n";
  auto r = start("embed");
  const std::string stem = "embedding_" + o.method;
  write_artifact(o.out / (stem + ".csv"), embedding_to_csv(e), r.stage, opts, r);
  write_artifact(o.out / (stem + ".json"), dump(embedding_sidecar(e)), r.stage, opts, r);
  write_artifact(o.out / (stem + "_2d.csv"), plot, r.stage, opts, r);
  return r;
}

StageResult train(const TrainOptions& o) {
  const bool classify = o.task == "classify";
  if (!classify && o.task != "linkpred") throw InputError("unknown training task '" + o.task + "'");
  TrainConfig tc = classify ? classification_defaults() : link_prediction_defaults();
  tc.model = model_kind_from_string(o.model);
  if (tc.model == ModelKind::logistic) throw InputError("train runs GNN models; use --model gcn or gat");
  if (o.epochs) tc.epochs = *o.epochs;
  if (o.lr) tc.learning_rate = *o.lr;
  tc.hidden = o.hidden;
  tc.embedding_dim = o.dims;
  tc.weighted = o.weighted;
  tc.seed = o.seed;
  json opts = {{"task", o.task},        {"graph", o.graph.generic_string()}, {"labels", opt_path(o.labels)},
               {"features", opt_path(o.features)}, {"model", o.model},  {"epochs", tc.epochs},
               {"lr", tc.learning_rate}, {"hidden", tc.hidden},          {"weighted", tc.weighted},
               {"seed", tc.seed}};
  const auto g = from_graphml(read_input(o.graph, "graph"));
  std::vector<std::string> missing;
  const Matrix x = load_features(g, o.features, missing);
  auto r = start("train");
  std::string loss = "epoch,loss\n";

  if (classify) {
    if (!o.labels) throw InputError("classification needs --labels");
    const auto labels = labels_from_json(read_json(*o.labels, "mentions"));
    const auto y = labels.class_indices(g);
    std::vector<bool> mask(y.size());
    std::vector<int> full(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      mask[i] = y[i] >= 0;
      full[i] = std::max(y[i], 0);
    }
    const auto result = train_node_classifier(g, x, full, mask, tc);
    std::string pred = "node,label,predicted\n";
    for (std::size_t i = 0; i < g.node_count(); ++i)
      pred += csv::join({g.node(i), y[i] >= 0 ? labels.works[static_cast<std::size_t>(y[i])] : "",
                         labels.works.at(static_cast<std::size_t>(result.predictions[i]))}) +
              "\n";
    EmbeddingMatrix hidden;
    hidden.entity_ids = g.nodes();
    hidden.vectors = result.hidden;
    hidden.provenance = Provenance::gnn_hidden;
    for (std::size_t i = 0; i < result.loss_history.size(); ++i)
      loss += std::to_string(i) + "," + csv::format_double(result.loss_history[i]) + "\n";
    write_artifact(o.out / "predictions.csv", pred, r.stage, opts, r);
    write_artifact(o.out / "hidden.csv", embedding_to_csv(hidden), r.stage, opts, r);
    write_artifact(o.out / "model.json", params_to_json(result.params).dump() + "\n", r.stage, opts, r);
  } else {
    opts["holdout"] = o.holdout;
    opts["dims"] = o.dims;
    const auto split = edge_split(g, o.holdout, derive_seed(o.seed, {0x73706c6974}));
    const auto predictor = train_link_predictor(split.train, x, tc);
    std::string scores = "u,v,label,score\n";
    std::vector<double> s;
    std::vector<int> t;
    for (int label : {1, 0}) {
      for (auto [u, v] : label ? split.test_positive : split.test_negative) {
        s.push_back(predictor.score(u, v));
        t.push_back(label);
        scores += csv::join({g.node(u), g.node(v), std::to_string(label), csv::format_double(s.back())}) + "\n";
      }
    }
    const json summary = {{"auc", roc_auc(s, t)},
                          {"train_edges", split.train.edge_count()},
                          {"test_pairs", s.size()},
                          {"train_connected", split.train_connected},
                          {"missing_features", missing}};
    for (std::size_t i = 0; i < predictor.loss_history.size(); ++i)
      loss += std::to_string(i) + "," + csv::format_double(predictor.loss_history[i]) + "\n";
    write_artifact(o.out / "link_scores.csv", scores, r.stage, opts, r);
    write_artifact(o.out / "linkpred.json", dump(summary), r.stage, opts, r);
    write_artifact(o.out / "model.json", params_to_json(predictor.params).dump() + "\n", r.stage, opts, r);
  }
  write_artifact(o.out / "loss.csv", loss, r.stage, opts, r);
  return r;
}

StageResult evaluate(const EvaluateOptions& o) {
  json config = read_json(o.config, "fixture");
  if (o.seed) config["seed"] = *o.seed;
  const json opts = {{"config", o.config.generic_string()}, {"experiment", config}};
  const auto result = run_experiment(config, o.config.parent_path());
  json reports = json::array();
  for (const auto& rep : result.reports) reports.push_back(report_to_json(rep));
  auto r = start("evaluate");
  write_artifact(o.out / "results.csv", result.csv, r.stage, opts, r);
  write_artifact(o.out / "reports.json", dump(reports), r.stage, opts, r);
  return r;
}

StageResult fixture(const FixtureOptions& o) {
  const json opts = {{"seed", o.seed}, {"blocks", 3}, {"block_size", 30}, {"p_in", 0.15}, {"p_out", 0.01}};
  const auto pp = default_benchmark(o.seed);
  EdgeList edges;
  edges.entries = pp.graph.edges();
  LabelAssignment labels;
  for (int b = 0; b < 3; ++b) labels.works.push_back("block" + std::to_string(b));
  for (std::size_t i = 0; i < pp.graph.node_count(); ++i)
    labels.labels[pp.graph.node(i)] = labels.works[static_cast<std::size_t>(pp.labels[i])];
  const auto ctx = context_corpus(pp, {}, derive_seed(o.seed, {0x63747874}));
  std::string alias_tsv = "# alias\tcanonical_id\n";
  for (const auto& [alias, id] : ctx.aliases) alias_tsv += alias + "\t" + id + "\n";
  const json manifest = {{"works", json::array({{{"work_id", ctx.document.work_id},
                                                 {"title", ctx.document.title},
                                                 {"path", "context.txt"}}})}};
  auto r = start("fixture");
  write_artifact(o.out / "benchmark" / "graph.graphml", to_graphml(pp.graph), r.stage, opts, r);
  write_artifact(o.out / "benchmark" / "edges.csv", edges_to_csv(edges), r.stage, opts, r);
  write_artifact(o.out / "benchmark" / "labels.json", dump(labels_to_json(labels)), r.stage, opts, r);
  write_artifact(o.out / "context" / "context.txt", ctx.document.text, r.stage, opts, r);
  write_artifact(o.out / "context" / "aliases.tsv", alias_tsv, r.stage, opts, r);
  write_artifact(o.out / "context" / "manifest.json", dump(manifest), r.stage, opts, r);
  return r;
}

}  // namespace charnet::pipeline
