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

// Python bindings. Matrices cross as numpy arrays; JSON crosses as text and
// is decoded on the Python side.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <nlohmann/json.hpp>

#include "charnet/characters.hpp"
#include "charnet/cooccur.hpp"
#include "charnet/corpus.hpp"
#include "charnet/embed.hpp"
#include "charnet/eval.hpp"
#include "charnet/gnn.hpp"
#include "charnet/graph.hpp"
#include "charnet/pipeline.hpp"

namespace py = pybind11;
using namespace py::literals;
using namespace charnet;

namespace {

using EdgeTuple = std::tuple<std::string, std::string, std::int64_t>;

std::vector<EdgeTuple> edge_tuples(const EdgeList& e) {
  std::vector<EdgeTuple> out;
  for (const auto& x : e.entries) out.emplace_back(x.u, x.v, x.weight);
  return out;
}

CharacterGraph graph_from_tuples(const std::vector<EdgeTuple>& edges, const std::vector<std::string>& nodes) {
  std::vector<WeightedEdge> e;
  for (const auto& [u, v, w] : edges) e.push_back({u, v, w});
  if (nodes.empty()) {
    EdgeList l;
    l.entries = std::move(e);
    return build_graph(l);
  }
  return CharacterGraph(nodes, e);
}

ModelKind kind(const std::string& s) { return model_kind_from_string(s); }

TrainConfig train_config(const std::string& task, const std::string& model, std::optional<std::size_t> epochs,
                         std::optional<double> lr, std::size_t hidden, bool weighted, std::uint64_t seed) {
  TrainConfig c = task == "linkpred" ? link_prediction_defaults() : classification_defaults();
  c.model = kind(model);
  if (epochs) c.epochs = *epochs;
  if (lr) c.learning_rate = *lr;
  c.hidden = hidden;
  c.weighted = weighted;
  c.seed = seed;
  return c;
}

py::dict embedding_dict(const EmbeddingMatrix& e) {
  return py::dict("ids"_a = e.entity_ids, "vectors"_a = e.vectors, "provenance"_a = to_string(e.provenance));
}

}  // namespace

PYBIND11_MODULE(_charnet, m) {
  m.doc() = "Character networks from novels: extraction, graph metrics, embeddings and GNN evaluation";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  // corpus
  py::class_<TokenizedCorpus>(m, "Corpus")
      .def_readonly("works", &TokenizedCorpus::works)
      .def_property_readonly("tokens", [](const TokenizedCorpus& c) {
        std::vector<std::string> out;
        for (const auto& t : c.tokens) out.push_back(t.surface);
        return out;
      })
      .def_property_readonly("sentences", [](const TokenizedCorpus& c) {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (const auto& s : c.sentences) out.emplace_back(s.begin, s.end);
        return out;
      })
      .def_property_readonly("chapters", [](const TokenizedCorpus& c) {
        std::vector<std::string> out;
        for (const auto& ch : c.chapters) out.push_back(ch.label);
        return out;
      })
      .def_property_readonly("dialogue_spans", [](const TokenizedCorpus& c) {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (const auto& s : c.dialogue_spans) out.emplace_back(s.begin, s.end);
        return out;
      })
      .def("to_json", [](const TokenizedCorpus& c) { return corpus_to_json(c).dump(); });

  m.def(
      "load_text",
      [](const std::string& text, const std::string& work_id, const std::vector<std::string>& keep_together) {
        SegmentationConfig cfg;
        cfg.tokenizer.keep_together = {keep_together.begin(), keep_together.end()};
        return load_corpus({RawDocument{work_id, work_id, text, ""}}, cfg);
      },
      "text"_a, "work_id"_a = "work", "keep_together"_a = std::vector<std::string>{});
  m.def(
      "read_manifest",
      [](const std::filesystem::path& manifest, const std::vector<std::string>& keep_together) {
        SegmentationConfig cfg;
        cfg.tokenizer.keep_together = {keep_together.begin(), keep_together.end()};
        return load_corpus(read_manifest(manifest), cfg);
      },
      "manifest"_a, "keep_together"_a = std::vector<std::string>{});
  m.def("tokenize", [](const std::string& text) { return tokenize_words(text); }, "text"_a);

  // characters
  py::class_<AliasTable>(m, "AliasTable")
      .def_property_readonly("canonical_ids", &AliasTable::canonical_ids)
      .def("lookup", [](const AliasTable& t, const std::string& alias) -> std::optional<std::string> {
        const std::string* hit = t.lookup(tokenize_words(alias, t.tokenizer()));
        return hit ? std::optional<std::string>(*hit) : std::nullopt;
      });
  m.def("compile_alias_table", [](const std::vector<std::pair<std::string, std::string>>& raw) {
    return compile_alias_table(raw);
  });
  // Compiled, since a raw pair list is only useful for compile_alias_table.
  m.def(
      "read_alias_file", [](const std::filesystem::path& path) { return compile_alias_table(read_alias_file(path)); },
      "path"_a);

  py::class_<MentionRecord>(m, "Mention")
      .def_readonly("canonical_id", &MentionRecord::canonical_id)
      .def_property_readonly("tokens", [](const MentionRecord& r) { return std::make_pair(r.tokens.begin, r.tokens.end); })
      .def_readonly("sentence", &MentionRecord::sentence_index)
      .def_readonly("chapter", &MentionRecord::chapter_index)
      .def_readonly("in_dialogue", &MentionRecord::in_dialogue)
      .def("__repr__", [](const MentionRecord& r) {
        return "<Mention " + r.canonical_id + " [" + std::to_string(r.tokens.begin) + ", " +
               std::to_string(r.tokens.end) + ")>";
      });
  m.def("extract_mentions", &extract_mentions, "corpus"_a, "aliases"_a);
  m.def(
      "mention_stats",
      [](const TokenizedCorpus& c, const AliasTable& t) {
        py::dict out;
        for (const auto& [work, s] : count_mention_types(c, t))
          out[py::str(work)] = py::dict("tokens"_a = s.token_count, "named_mentions"_a = s.explicit_named_mentions,
                                        "pronouns"_a = s.pronoun_token_count, "cooccurrences"_a = s.cooccurrence_count);
        return out;
      },
      "corpus"_a, "aliases"_a);
  m.def(
      "narrative_chart",
      [](const std::vector<MentionRecord>& mentions, const std::vector<std::string>& characters,
         const TokenizedCorpus& c, const AliasTable& t) {
        const auto ch = narrative_chart(mentions, characters, c, t);
        return py::dict("characters"_a = ch.characters, "chapters"_a = ch.chapter_labels, "values"_a = ch.values);
      },
      "mentions"_a, "characters"_a, "corpus"_a, "aliases"_a);

  // cooccur
  m.def(
      "sentence_cooccurrences",
      [](const std::vector<MentionRecord>& mentions, const TokenizedCorpus& c, bool instances) {
        return edge_tuples(sentence_cooccurrences(
            mentions, c, instances ? SentenceMultiplicity::instances : SentenceMultiplicity::once));
      },
      "mentions"_a, "corpus"_a, "instances"_a = false);
  m.def(
      "window_cooccurrences",
      [](const std::vector<MentionRecord>& mentions, const TokenizedCorpus& c, std::size_t window_chars) {
        return edge_tuples(window_cooccurrences(mentions, c, window_chars));
      },
      "mentions"_a, "corpus"_a, "window_chars"_a = 2000);

  // graph
  py::class_<CharacterGraph>(m, "CharacterGraph")
      .def(py::init(&graph_from_tuples), "edges"_a, "nodes"_a = std::vector<std::string>{})
      .def_property_readonly("nodes", &CharacterGraph::nodes)
      .def_property_readonly("edges", [](const CharacterGraph& g) {
        std::vector<EdgeTuple> out;
        for (const auto& e : g.edges()) out.emplace_back(e.u, e.v, e.weight);
        return out;
      })
      .def("__len__", &CharacterGraph::node_count)
      .def("edge_count", &CharacterGraph::edge_count)
      .def("weight", [](const CharacterGraph& g, const std::string& u, const std::string& v) {
        return g.weight(g.index_of(u), g.index_of(v));
      })
      .def("degree", [](const CharacterGraph& g, const std::string& v) { return degree(g, v); })
      .def("density", [](const CharacterGraph& g) { return density(g); })
      .def("undirected_density", [](const CharacterGraph& g) { return undirected_density(g); })
      .def("mean_degree", [](const CharacterGraph& g) { return mean_degree(g); })
      .def("shortest_path_stats",
           [](const CharacterGraph& g) {
             const auto s = shortest_path_stats(g);
             return py::dict("diameter"_a = s.diameter, "avg_shortest_path"_a = s.avg_shortest_path,
                             "largest_component_only"_a = s.largest_component_only,
                             "component_size"_a = s.component_size);
           })
      .def("betweenness",
           [](const CharacterGraph& g, bool normalized) {
             const auto b = betweenness(g);
             std::map<std::string, double> out;
             for (std::size_t i = 0; i < g.node_count(); ++i) out[g.node(i)] = normalized ? b.normalized[i] : b.raw[i];
             return out;
           },
           "normalized"_a = false)
      .def("rank",
           [](const CharacterGraph& g, const std::string& measure, std::size_t k) {
             if (measure != "degree" && measure != "betweenness")
               throw InputError("measure must be 'degree' or 'betweenness'");
             return rank_centrality(
                 g, measure == "degree" ? CentralityMeasure::degree : CentralityMeasure::betweenness, k);
           },
           "measure"_a, "k"_a)
      .def("largest_component", [](const CharacterGraph& g) { return largest_component(g); })
      .def("layout",
           [](const CharacterGraph& g, std::size_t iterations, std::uint64_t seed) {
             const auto l = layout_fr(g, {iterations, seed});
             std::map<std::string, std::pair<double, double>> out;
             for (std::size_t i = 0; i < g.node_count(); ++i) out[g.node(i)] = {l.positions[i].x, l.positions[i].y};
             return out;
           },
           "iterations"_a = 500, "seed"_a = 0)
      .def("to_graphml", [](const CharacterGraph& g) { return to_graphml(g); })
      .def_static("from_graphml", [](const std::string& xml) { return from_graphml(xml); });
  m.def("density_from_counts", &density_from_counts, "n"_a, "m"_a);
  m.def("mean_degree_from_counts", &mean_degree_from_counts, "n"_a, "m"_a);

  // embed
  m.def(
      "transition_probabilities",
      [](const CharacterGraph& g, std::optional<std::string> previous, const std::string& current, double p, double q,
         bool weighted) {
        WalkConfig cfg;
        cfg.p = p;
        cfg.q = q;
        cfg.weighted = weighted;
        std::optional<std::size_t> prev;
        if (previous) prev = g.index_of(*previous);
        std::map<std::string, double> out;
        for (const auto& [x, pr] : transition_probabilities(g, prev, g.index_of(current), cfg)) out[g.node(x)] = pr;
        return out;
      },
      "graph"_a, "previous"_a, "current"_a, "p"_a = 1.0, "q"_a = 1.0, "weighted"_a = false);
  m.def(
      "node2vec",
      [](const CharacterGraph& g, std::size_t dim, double p, double q, std::size_t walks_per_node,
         std::size_t walk_length, std::size_t window, std::size_t epochs, bool weighted, std::uint64_t seed) {
        Node2VecConfig c;
        c.dim = dim;
        c.walk.p = p;
        c.walk.q = q;
        c.walk.walks_per_node = walks_per_node;
        c.walk.walk_length = walk_length;
        c.walk.weighted = weighted;
        c.walk.seed = seed;
        c.window = window;
        c.epochs = epochs;
        return embedding_dict(node2vec(g, c).embedding);
      },
      "graph"_a, "dim"_a = 20, "p"_a = 1.0, "q"_a = 1.0, "walks_per_node"_a = 10, "walk_length"_a = 80,
      "window"_a = 10, "epochs"_a = 5, "weighted"_a = false, "seed"_a = 1);
  m.def(
      "laplacian_eigenmap",
      [](const CharacterGraph& g, std::size_t dim, bool weighted) {
        const auto r = laplacian_eigenmap(g, dim, weighted);
        py::dict d = embedding_dict(r.embedding);
        d["eigenvalues"] = r.eigenvalues;
        d["largest_component_only"] = r.largest_component_only;
        return d;
      },
      "graph"_a, "dim"_a = 20, "weighted"_a = false);
  m.def(
      "word_embeddings",
      [](const TokenizedCorpus& c, const std::vector<MentionRecord>& mentions, std::size_t dim, std::size_t min_count,
         std::size_t epochs, std::uint64_t seed) {
        WordEmbeddingConfig cfg;
        cfg.dim = dim;
        cfg.min_count = min_count;
        cfg.epochs = epochs;
        cfg.seed = seed;
        return embedding_dict(word_embeddings(c, mentions, cfg).embedding);
      },
      "corpus"_a, "mentions"_a, "dim"_a = 300, "min_count"_a = 5, "epochs"_a = 5, "seed"_a = 1);

  // gnn
  m.def("normalize_adjacency", &normalize_adjacency, "graph"_a, "weighted"_a = false);
  m.def("one_hot_features", &one_hot_features, "n"_a);
  m.def(
      "gradient_check",
      [](const std::string& model, std::size_t n, std::uint64_t seed, bool link) {
        const auto k = kind(model);
        return gradient_check(k, make_gradcheck_instance(k, n, seed,
                                                         link ? Objective::Task::link_prediction
                                                              : Objective::Task::classification));
      },
      "model"_a, "n"_a = 5, "seed"_a = 0, "link_prediction"_a = false);
  m.def(
      "train_node_classifier",
      [](const CharacterGraph& g, const Matrix& features, const std::vector<int>& labels,
         const std::vector<bool>& train_mask, const std::string& model, std::optional<std::size_t> epochs,
         std::optional<double> lr, std::size_t hidden, bool weighted, std::uint64_t seed) {
        NodeClassifierResult r;
        {
          py::gil_scoped_release release;
          r = train_node_classifier(g, features, labels, train_mask,
                                    train_config("classify", model, epochs, lr, hidden, weighted, seed));
        }
        return py::dict("predictions"_a = r.predictions, "probabilities"_a = r.probabilities, "hidden"_a = r.hidden,
                        "loss"_a = r.loss_history);
      },
      "graph"_a, "features"_a, "labels"_a, "train_mask"_a, "model"_a = "gcn", "epochs"_a = py::none(),
      "lr"_a = py::none(), "hidden"_a = 20, "weighted"_a = false, "seed"_a = 1);
  m.def(
      "train_link_predictor",
      [](const CharacterGraph& g, const Matrix& features, const std::string& model, std::optional<std::size_t> epochs,
         std::optional<double> lr, std::size_t hidden, bool weighted, std::uint64_t seed) {
        LinkPredictor r;
        {
          py::gil_scoped_release release;
          r = train_link_predictor(g, features, train_config("linkpred", model, epochs, lr, hidden, weighted, seed));
        }
        return py::dict("node_vectors"_a = r.node_vectors, "hidden"_a = r.hidden, "loss"_a = r.loss_history);
      },
      "graph"_a, "features"_a, "model"_a = "gcn", "epochs"_a = py::none(), "lr"_a = py::none(), "hidden"_a = 20,
      "weighted"_a = false, "seed"_a = 1);

  // eval
  m.def("roc_auc", &roc_auc, "scores"_a, "labels"_a);
  m.def("roc_auc_trapezoid", &roc_auc_trapezoid, "scores"_a, "labels"_a);
  m.def(
      "macro_prf",
      [](const std::vector<int>& y, const std::vector<int>& p) {
        const auto s = macro_prf(y, p);
        return py::dict("f1"_a = s.f1, "precision"_a = s.precision, "recall"_a = s.recall);
      },
      "y_true"_a, "y_pred"_a);
  m.def("stratified_folds", &stratified_folds, "labels"_a, "k"_a, "seed"_a);
  m.def(
      "derive_labels",
      [](const std::map<std::string, std::map<std::string, std::size_t>>& counts, const std::vector<std::string>& works) {
        return derive_labels(counts, works).labels;
      },
      "counts"_a, "work_order"_a);
  m.def(
      "planted_partition",
      [](std::size_t blocks, std::size_t size, double p_in, double p_out, std::uint64_t seed) {
        auto pp = planted_partition(blocks, size, p_in, p_out, seed);
        return py::make_tuple(pp.graph, pp.labels);
      },
      "blocks"_a = 3, "block_size"_a = 30, "p_in"_a = 0.15, "p_out"_a = 0.01, "seed"_a = 2024);
  m.def(
      "edge_split",
      [](const CharacterGraph& g, double holdout, std::uint64_t seed) {
        auto s = edge_split(g, holdout, seed);
        return py::dict("train"_a = s.train, "test_positive"_a = s.test_positive, "test_negative"_a = s.test_negative,
                        "train_connected"_a = s.train_connected);
      },
      "graph"_a, "holdout"_a = 0.1, "seed"_a = 1);
  m.def(
      "kfold_node_cv",
      [](const CharacterGraph& g, const Matrix& features, const std::vector<int>& labels, std::size_t k,
         const std::string& model, std::optional<std::size_t> epochs, std::optional<double> lr, std::uint64_t seed) {
        ClassifierSpec spec;
        spec.model = kind(model);
        if (epochs) spec.train.epochs = *epochs;
        if (lr) spec.train.learning_rate = *lr;
        std::string out;
        {
          py::gil_scoped_release release;
          out = report_to_json(kfold_node_cv(g, features, labels, k, spec, seed)).dump();
        }
        return out;
      },
      "graph"_a, "features"_a, "labels"_a, "k"_a = 10, "model"_a = "gcn", "epochs"_a = py::none(), "lr"_a = py::none(),
      "seed"_a = 1);
  m.def(
      "run_experiment",
      [](const std::string& config, const std::filesystem::path& base_dir) {
        const auto cfg = nlohmann::json::parse(config);
        ExperimentResult r;
        {
          py::gil_scoped_release release;
          r = run_experiment(cfg, base_dir);
        }
        nlohmann::json reports = nlohmann::json::array();
        for (const auto& rep : r.reports) reports.push_back(report_to_json(rep));
        return py::make_tuple(r.csv, reports.dump());
      },
      "config"_a, "base_dir"_a = ".");
  m.def("config_hash", [](const std::string& j) { return pipeline::config_hash(nlohmann::json::parse(j)); });
}
