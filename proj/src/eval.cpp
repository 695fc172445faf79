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

#include "charnet/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>

#include "charnet/characters.hpp"
#include "charnet/csv.hpp"
#include "charnet/random.hpp"

namespace charnet {

namespace {

using Index = Eigen::Index;
Index ix(std::size_t i) { return static_cast<Index>(i); }

std::string pad3(std::size_t i) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%03zu", i);
  return buf;
}

}  // namespace

std::vector<int> LabelAssignment::class_indices(const CharacterGraph& g) const {
  std::map<std::string, int> cls;
  for (std::size_t i = 0; i < works.size(); ++i) cls.emplace(works[i], static_cast<int>(i));
  std::vector<int> out(g.node_count(), -1);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    auto it = labels.find(g.node(i));
    if (it != labels.end()) out[i] = cls.at(it->second);
  }
  return out;
}

LabelAssignment derive_labels(const std::map<std::string, std::map<std::string, std::size_t>>& counts,
                              const std::vector<std::string>& work_order,
                              const std::vector<std::string>& characters) {
  if (work_order.empty()) throw InputError("label derivation needs at least one work");
  std::set<std::string> known(work_order.begin(), work_order.end());
  if (known.size() != work_order.size()) throw InputError("work order lists a work twice");

  std::map<std::string, double> work_total;
  for (const auto& [c, per_work] : counts) {
    for (const auto& [w, n] : per_work) {
      if (!known.count(w)) throw InputError("mention counts reference unknown work '" + w + "'");
      work_total[w] += static_cast<double>(n);
    }
  }
  for (const auto& c : characters) {
    auto it = counts.find(c);
    std::size_t total = 0;
    if (it != counts.end())
      for (const auto& [w, n] : it->second) total += n;
    if (total == 0) throw DomainError("character '" + c + "' has no mentions; cannot derive a label");
  }

  LabelAssignment out;
  out.works = work_order;
  for (const auto& [c, per_work] : counts) {
    double best = -1.0;
    const std::string* best_work = nullptr;
    for (const auto& w : work_order) {
      auto it = per_work.find(w);
      if (it == per_work.end() || it->second == 0) continue;
      const double frac = static_cast<double>(it->second) / work_total[w];
      if (frac > best) {
        best = frac;
        best_work = &w;
      }
    }
    if (!best_work) continue;
    out.labels[c] = *best_work;
    out.counts[c] = per_work;
  }
  return out;
}

nlohmann::json labels_to_json(const LabelAssignment& labels) {
  return {{"works", labels.works}, {"labels", labels.labels}, {"counts", labels.counts}};
}

LabelAssignment labels_from_json(const nlohmann::json& j) {
  LabelAssignment out;
  try {
    out.works = j.at("works").get<std::vector<std::string>>();
    out.labels = j.at("labels").get<std::map<std::string, std::string>>();
    if (j.contains("counts")) out.counts = j.at("counts").get<decltype(out.counts)>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed labels file: ") + e.what());
  }
  std::set<std::string> works(out.works.begin(), out.works.end());
  for (const auto& [c, w] : out.labels)
    if (!works.count(w)) throw InputError("label of '" + c + "' names unknown work '" + w + "'");
  return out;
}

PrfScores macro_prf(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  if (y_true.size() != y_pred.size())
    throw DomainError("y_true has " + std::to_string(y_true.size()) + " entries, y_pred " +
                      std::to_string(y_pred.size()));
  if (y_true.empty()) throw DomainError("macro_prf needs at least one sample");
  std::set<int> classes(y_true.begin(), y_true.end());
  PrfScores s;
  for (int c : classes) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
      const bool t = y_true[i] == c, p = y_pred[i] == c;
      tp += t && p;
      fp += !t && p;
      fn += t && !p;
    }
    const double prec = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double rec = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
    s.precision += prec;
    s.recall += rec;
    s.f1 += f1;
  }
  const double k = static_cast<double>(classes.size());
  s.precision /= k;
  s.recall /= k;
  s.f1 /= k;
  return s;
}

namespace {

void check_binary(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw DomainError("scores and labels differ in length");
  bool pos = false, neg = false;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw DomainError("ROC labels must be 0 or 1");
    if (!std::isfinite(scores[i])) throw DomainError("ROC scores must be finite");
    (labels[i] ? pos : neg) = true;
  }
  if (!pos || !neg) throw DomainError("ROC AUC needs both positive and negative labels");
}

}  // namespace

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  check_binary(scores, labels);
  // Rank-sum form of the pairwise statistic: average ranks handle ties.
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0, n_pos = 0.0, n_neg = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + j) + 1.0) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]]) rank_sum += avg_rank;
    i = j;
  }
  for (int l : labels) (l ? n_pos : n_neg) += 1.0;
  return (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

std::vector<RocPoint> roc_curve(const std::vector<double>& scores, const std::vector<int>& labels) {
  check_binary(scores, labels);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double n_pos = 0, n_neg = 0;
  for (int l : labels) (l ? n_pos : n_neg) += 1.0;
  std::vector<RocPoint> curve{{0.0, 0.0, std::numeric_limits<double>::infinity()}};
  double tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double thr = scores[order[i]];
    while (i < order.size() && scores[order[i]] == thr) {
      (labels[order[i]] ? tp : fp) += 1.0;
      ++i;
    }
    curve.push_back({fp / n_neg, tp / n_pos, thr});
  }
  return curve;
}

double roc_auc_trapezoid(const std::vector<double>& scores, const std::vector<int>& labels) {
  const auto curve = roc_curve(scores, labels);
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i)
    area += (curve[i].fpr - curve[i - 1].fpr) * (curve[i].tpr + curve[i - 1].tpr) / 2.0;
  return area;
}

std::vector<int> stratified_folds(const std::vector<int>& labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw DomainError("cross-validation needs k >= 2");
  std::map<int, std::vector<std::size_t>> by_class;
  std::size_t labeled = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) continue;
    by_class[labels[i]].push_back(i);
    ++labeled;
  }
  if (k > labeled)
    throw DomainError("k = " + std::to_string(k) + " exceeds the " + std::to_string(labeled) + " labeled nodes");
  Rng rng(seed);
  std::vector<int> fold(labels.size(), -1);
  std::size_t deal = 0;
  for (auto& [c, members] : by_class) {
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t i : members) fold[i] = static_cast<int>(deal++ % k);
  }
  return fold;
}

void EvalReport::summarize() {
  mean.clear();
  sd.clear();
  if (folds.empty()) return;
  std::set<std::string> keys;
  for (const auto& f : folds)
    for (const auto& [key, v] : f) keys.insert(key);
  for (const auto& key : keys) {
    std::vector<double> xs;
    for (const auto& f : folds) {
      auto it = f.find(key);
      if (it != f.end()) xs.push_back(it->second);
    }
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - m) * (x - m);
    mean[key] = m;
    sd[key] = std::sqrt(var / static_cast<double>(xs.size()));
  }
}

nlohmann::json report_to_json(const EvalReport& r) {
  return {{"graph", r.graph},       {"task", r.task}, {"method", r.method},   {"feature", r.feature},
          {"folds", r.folds},       {"mean", r.mean}, {"sd", r.sd},           {"config", r.config},
          {"seed", r.seed},         {"warnings", r.warnings}};
}

EvalReport report_from_json(const nlohmann::json& j) {
  EvalReport r;
  try {
    r.graph = j.value("graph", "");
    r.task = j.at("task").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.feature = j.at("feature").get<std::string>();
    r.folds = j.at("folds").get<decltype(r.folds)>();
    r.config = j.value("config", nlohmann::json::object());
    r.seed = j.value("seed", std::uint64_t{0});
    r.warnings = j.value("warnings", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed report: ") + e.what());
  }
  r.summarize();
  return r;
}

EvalReport kfold_node_cv(const CharacterGraph& g, const Matrix& features, const std::vector<int>& labels,
                         std::size_t k, const ClassifierSpec& spec, std::uint64_t seed) {
  const std::size_t n = g.node_count();
  if (labels.size() != n) throw DomainError("labels must cover every node");
  if (static_cast<std::size_t>(features.rows()) != n) throw DomainError("feature rows must match node count");
  EvalReport report;
  report.task = "classification";
  report.method = to_string(spec.model);
  report.seed = seed;
  report.config = {{"k", k}};
  const auto fold = stratified_folds(labels, k, seed);
  std::set<int> all_classes;
  for (int l : labels)
    if (l >= 0) all_classes.insert(l);

  for (std::size_t f = 0; f < k; ++f) {
    std::vector<bool> train(n, false);
    std::vector<std::size_t> test;
    std::set<int> train_classes;
    for (std::size_t i = 0; i < n; ++i) {
      if (fold[i] < 0) continue;
      if (fold[i] == static_cast<int>(f)) {
        test.push_back(i);
      } else {
        train[i] = true;
        train_classes.insert(labels[i]);
      }
    }
    for (int c : all_classes)
      if (!train_classes.count(c))
        report.warnings.push_back("fold " + std::to_string(f) + ": class " + std::to_string(c) +
                                  " absent from training labels");

    const std::uint64_t fold_seed = derive_seed(seed, {f});
    std::vector<int> predicted;
    if (spec.model == ModelKind::logistic) {
      std::vector<std::size_t> rows;
      std::vector<int> y;
      for (std::size_t i = 0; i < n; ++i)
        if (train[i]) {
          rows.push_back(i);
          y.push_back(labels[i]);
        }
      Matrix xtr(ix(rows.size()), features.cols());
      for (std::size_t r = 0; r < rows.size(); ++r) xtr.row(ix(r)) = features.row(ix(rows[r]));
      LogisticConfig lc = spec.logistic;
      lc.seed = fold_seed;
      const auto model = logistic_fit(xtr, y, lc);
      Matrix xte(ix(test.size()), features.cols());
      for (std::size_t r = 0; r < test.size(); ++r) xte.row(ix(r)) = features.row(ix(test[r]));
      const Matrix p = logistic_predict(model, xte);
      for (Index r = 0; r < p.rows(); ++r) {
        Index best;
        p.row(r).maxCoeff(&best);
        predicted.push_back(static_cast<int>(best));
      }
    } else {
      TrainConfig tc = spec.train;
      tc.model = spec.model;
      tc.seed = fold_seed;
      std::vector<int> full = labels;
      for (auto& l : full) l = std::max(l, 0);  // unlabeled rows are masked out anyway
      const auto result = train_node_classifier(g, features, full, train, tc);
      for (std::size_t i : test) predicted.push_back(result.predictions[i]);
    }
    std::vector<int> truth;
    for (std::size_t i : test) truth.push_back(labels[i]);
    const auto prf = macro_prf(truth, predicted);
    report.folds.push_back({{"f1", prf.f1}, {"precision", prf.precision}, {"recall", prf.recall}});
  }
  report.summarize();
  return report;
}

EdgeSplit edge_split(const CharacterGraph& g, double holdout_fraction, std::uint64_t seed) {
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) throw DomainError("holdout fraction must be in (0, 1)");
  auto edges = g.edges();
  const auto m = edges.size();
  const auto holdout = static_cast<std::size_t>(std::lround(holdout_fraction * static_cast<double>(m)));
  if (holdout == 0) throw DomainError("holdout of " + std::to_string(m) + " edges rounds to zero");
  if (holdout >= m)
    throw DomainError("holdout of " + std::to_string(holdout) + " edges leaves no training edges");
  Rng rng(seed);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<bool> held(m, false);
  for (std::size_t i = 0; i < holdout; ++i) held[order[i]] = true;

  EdgeSplit split;
  std::vector<WeightedEdge> train_edges;
  for (std::size_t i = 0; i < m; ++i) {
    if (held[i]) split.test_positive.emplace_back(g.index_of(edges[i].u), g.index_of(edges[i].v));
    else train_edges.push_back(edges[i]);
  }
  std::sort(split.test_positive.begin(), split.test_positive.end());
  split.train = CharacterGraph(g.nodes(), train_edges);
  // Non-edges of the full graph are disjoint from train and test positives.
  split.test_negative = sample_non_edges(g, holdout, rng, {}, true);
  split.train_connected = connected_components(split.train).size() == 1;
  return split;
}

Matrix hadamard_features(const Matrix& x, const std::vector<NodePair>& pairs) {
  Matrix out(ix(pairs.size()), x.cols());
  for (std::size_t i = 0; i < pairs.size(); ++i)
    out.row(ix(i)) = x.row(ix(pairs[i].first)).cwiseProduct(x.row(ix(pairs[i].second)));
  return out;
}

double embedding_link_baseline(const EmbeddingMatrix& embedding, const EdgeSplit& split, std::uint64_t seed,
                               const LogisticConfig& config) {
  const Matrix x = aligned_features(split.train, embedding);
  std::vector<NodePair> train_pos;
  for (const auto& e : split.train.edges())
    train_pos.emplace_back(split.train.index_of(e.u), split.train.index_of(e.v));
  if (train_pos.empty()) throw DomainError("training graph has no edges");
  std::vector<NodePair> exclude = split.test_positive;
  exclude.insert(exclude.end(), split.test_negative.begin(), split.test_negative.end());
  Rng rng(derive_seed(seed, {0x6e6567}));
  const auto train_neg = sample_non_edges(split.train, train_pos.size(), rng, exclude, false);

  std::vector<NodePair> pairs = train_pos;
  pairs.insert(pairs.end(), train_neg.begin(), train_neg.end());
  std::vector<int> y(train_pos.size(), 1);
  y.resize(pairs.size(), 0);
  LogisticConfig lc = config;
  lc.seed = seed;
  const auto model = logistic_fit(hadamard_features(x, pairs), y, lc);

  std::vector<NodePair> test = split.test_positive;
  test.insert(test.end(), split.test_negative.begin(), split.test_negative.end());
  const Matrix p = logistic_predict(model, hadamard_features(x, test));
  std::vector<double> scores(test.size());
  std::vector<int> truth(test.size(), 0);
  for (std::size_t i = 0; i < test.size(); ++i) {
    scores[i] = p(ix(i), 1);
    truth[i] = i < split.test_positive.size();
  }
  return roc_auc(scores, truth);
}

double gnn_link_auc(const EdgeSplit& split, const Matrix& features, const TrainConfig& config) {
  const auto predictor = train_link_predictor(split.train, features, config);
  std::vector<double> scores;
  std::vector<int> truth;
  for (auto [u, v] : split.test_positive) {
    scores.push_back(predictor.score(u, v));
    truth.push_back(1);
  }
  for (auto [u, v] : split.test_negative) {
    scores.push_back(predictor.score(u, v));
    truth.push_back(0);
  }
  return roc_auc(scores, truth);
}

EvalReport repeated_link_holdout(const CharacterGraph& g, const FeatureBuilder& features, const LinkSpec& spec,
                                 std::size_t repeats, double holdout_fraction, std::uint64_t seed) {
  if (repeats == 0) throw DomainError("need at least one holdout repeat");
  EvalReport report;
  report.task = "link_prediction";
  report.method = to_string(spec.model);
  report.seed = seed;
  report.config = {{"repeats", repeats}, {"holdout", holdout_fraction}};
  for (std::size_t r = 0; r < repeats; ++r) {
    const std::uint64_t s = derive_seed(seed, {r});
    const auto split = edge_split(g, holdout_fraction, s);
    if (!split.train_connected)
      report.warnings.push_back("repeat " + std::to_string(r) + ": training graph is disconnected");
    const Matrix x = features(split.train, derive_seed(s, {1}));
    double auc;
    if (spec.model == ModelKind::logistic) {
      EmbeddingMatrix e;
      e.entity_ids = split.train.nodes();
      e.vectors = x;
      auc = embedding_link_baseline(e, split, derive_seed(s, {2}), spec.logistic);
    } else {
      TrainConfig tc = spec.train;
      tc.model = spec.model;
      tc.seed = derive_seed(s, {2});
      auc = gnn_link_auc(split, x, tc);
    }
    report.folds.push_back({{"auc", auc}});
  }
  report.summarize();
  return report;
}

PlantedPartition planted_partition(std::size_t blocks, std::size_t block_size, double p_in, double p_out,
                                   std::uint64_t seed) {
  if (blocks == 0 || block_size == 0) throw DomainError("planted partition needs blocks and nodes");
  if (!(p_in >= 0 && p_in <= 1 && p_out >= 0 && p_out <= 1)) throw DomainError("edge probabilities must be in [0, 1]");
  const std::size_t n = blocks * block_size;
  if (n > 1000) throw DomainError("planted partition is limited to 1000 nodes");
  std::vector<std::string> nodes;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back("v" + pad3(i));
  Rng rng(seed);
  std::vector<WeightedEdge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double p = i / block_size == j / block_size ? p_in : p_out;
      if (rng.uniform() < p) edges.push_back({nodes[i], nodes[j], 1});
    }
  PlantedPartition pp;
  pp.graph = CharacterGraph(nodes, edges);
  for (std::size_t i = 0; i < n; ++i) {
    pp.labels.push_back(static_cast<int>(i / block_size));
    pp.graph.set_attribute(nodes[i], "block", std::to_string(i / block_size));
  }
  return pp;
}

PlantedPartition default_benchmark(std::uint64_t seed) { return planted_partition(3, 30, 0.15, 0.01, seed); }

ContextCorpus context_corpus(const PlantedPartition& pp, const ContextCorpusConfig& cfg, std::uint64_t seed) {
  if (cfg.words_per_sentence == 0 || cfg.topic_vocabulary == 0 || cfg.shared_vocabulary == 0)
    throw DomainError("context corpus needs non-empty sentences and vocabularies");
  Rng rng(seed);
  const auto& nodes = pp.graph.nodes();
  std::vector<std::pair<std::size_t, std::size_t>> slots;  // (node, repeat)
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t r = 0; r < cfg.sentences_per_node; ++r) slots.emplace_back(i, r);
  rng.shuffle(std::span<std::pair<std::size_t, std::size_t>>(slots));

  ContextCorpus out;
  out.document.work_id = "context";
  out.document.title = "Synthetic context corpus";
  std::string text;
  const std::size_t per_chapter = std::max<std::size_t>(1, slots.size() / 10);
  for (std::size_t s = 0; s < slots.size(); ++s) {
    if (s % per_chapter == 0) text += (s ? "\n\n" : "") + std::string("Chapter ") + std::to_string(s / per_chapter + 1) + "\n\n";
    const std::size_t node = slots[s].first;
    const int block = pp.labels[node];
    std::vector<std::string> words;
    for (std::size_t w = 0; w < cfg.words_per_sentence; ++w) {
      if (rng.uniform() < cfg.topic_probability)
        words.push_back("t" + std::to_string(block) + "w" + pad3(rng.below(cfg.topic_vocabulary)));
      else
        words.push_back("sw" + pad3(rng.below(cfg.shared_vocabulary)));
    }
    words.insert(words.begin() + static_cast<std::ptrdiff_t>(rng.below(words.size() + 1)),
                 "V" + nodes[node].substr(1));
    // Capitalize the first word so the sentence splitter sees a new sentence.
    std::string sentence;
    for (std::size_t w = 0; w < words.size(); ++w) {
      std::string word = words[w];
      if (w == 0) word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
      sentence += (w ? " " : "") + word;
    }
    text += sentence + ". ";
  }
  out.document.text = text;
  for (const auto& id : nodes) out.aliases.emplace_back("V" + id.substr(1), id);
  return out;
}

Matrix random_features(std::size_t n, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  Matrix x(ix(n), ix(dim));
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) x(i, j) = rng.uniform(-1.0, 1.0);
  return x;
}

std::string results_to_csv(const std::vector<EvalReport>& reports) {
  std::string out = "graph,task,method,feature,folds,f1_mean,f1_sd,precision_mean,precision_sd,recall_mean,"
                    "recall_sd,auc_mean,auc_sd\n";
  auto metric = [](const std::map<std::string, double>& m, const char* key) {
    auto it = m.find(key);
    return it == m.end() ? std::string() : csv::format_double(it->second);
  };
  for (const auto& r : reports) {
    std::vector<std::string> row = {r.graph, r.task, r.method, r.feature, std::to_string(r.folds.size())};
    for (const char* key : {"f1", "precision", "recall", "auc"}) {
      row.push_back(metric(r.mean, key));
      row.push_back(metric(r.sd, key));
    }
    out += csv::join(row) + "\n";
  }
  return out;
}

namespace {

struct GraphSource {
  std::string name;
  CharacterGraph graph;
  std::vector<int> labels;
  std::optional<EmbeddingMatrix> word;
  std::optional<PlantedPartition> planted;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::string require_file(const std::filesystem::path& path, const std::string& stage) {
  if (!std::filesystem::exists(path))
    throw InputError("missing artifact '" + path.string() + "': run `charnet " + stage + "` first");
  return csv::read_file(path);
}

TrainConfig train_from_json(const nlohmann::json& j, TrainConfig c) {
  c.epochs = j.value("epochs", c.epochs);
  c.learning_rate = j.value("lr", c.learning_rate);
  c.hidden = j.value("hidden", c.hidden);
  c.embedding_dim = j.value("embedding_dim", c.embedding_dim);
  c.weighted = j.value("weighted", c.weighted);
  c.dropout = j.value("dropout", c.dropout);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  return c;
}

Node2VecConfig node2vec_from_json(const nlohmann::json& j) {
  Node2VecConfig c;
  c.dim = j.value("dim", c.dim);
  c.window = j.value("window", c.window);
  c.negative_samples = j.value("negative_samples", c.negative_samples);
  c.epochs = j.value("epochs", c.epochs);
  c.learning_rate = j.value("lr", c.learning_rate);
  c.walk.p = j.value("p", c.walk.p);
  c.walk.q = j.value("q", c.walk.q);
  c.walk.walks_per_node = j.value("walks_per_node", c.walk.walks_per_node);
  c.walk.walk_length = j.value("walk_length", c.walk.walk_length);
  c.walk.weighted = j.value("weighted", c.walk.weighted);
  return c;
}

GraphSource load_source(const nlohmann::json& spec, const std::filesystem::path& base) {
  GraphSource src;
  src.name = spec.value("name", "graph");
  if (spec.contains("planted_partition")) {
    const auto& pp = spec.at("planted_partition");
    src.planted = planted_partition(pp.value("blocks", 3u), pp.value("block_size", 30u), pp.value("p_in", 0.15),
                                    pp.value("p_out", 0.01), pp.value("seed", std::uint64_t{2024}));
    src.graph = src.planted->graph;
    src.labels = src.planted->labels;
    return src;
  }
  if (!spec.contains("graphml")) throw InputError("graph '" + src.name + "' needs 'graphml' or 'planted_partition'");
  src.graph = from_graphml(require_file(resolve(base, spec.at("graphml")), "graph"));
  if (spec.contains("labels")) {
    const auto labels =
        labels_from_json(nlohmann::json::parse(require_file(resolve(base, spec.at("labels")), "mentions")));
    src.labels = labels.class_indices(src.graph);
  }
  if (spec.contains("word_embedding"))
    src.word = embedding_from_csv(require_file(resolve(base, spec.at("word_embedding")), "embed word"),
                                  Provenance::word_context);
  return src;
}

Matrix build_features(const std::string& feature, const GraphSource& src, const CharacterGraph& g,
                      const nlohmann::json& config, std::uint64_t seed, std::vector<std::string>& warnings) {
  if (feature == "ohe") return one_hot_features(g.node_count());
  if (feature == "random") return random_features(g.node_count(), config.value("/random/dim"_json_pointer, 20u), seed);
  if (feature == "node2vec") {
    Node2VecConfig c = node2vec_from_json(config.value("node2vec", nlohmann::json::object()));
    c.walk.seed = seed;
    return node2vec(g, c).embedding.vectors;
  }
  if (feature == "le") {
    const auto le = laplacian_eigenmap(g, config.value("/le/dim"_json_pointer, 20u),
                                       config.value("/le/weighted"_json_pointer, false));
    std::vector<std::string> missing;
    Matrix x = aligned_features(g, le.embedding, &missing);
    if (!missing.empty())
      warnings.push_back("le: " + std::to_string(missing.size()) + " nodes outside the largest component get zeros");
    return x;
  }
  if (feature == "word") {
    std::vector<std::string> missing;
    Matrix x;
    if (src.word) {
      x = aligned_features(g, *src.word, &missing);
    } else if (src.planted) {
      const auto wj = config.value("word", nlohmann::json::object());
      ContextCorpusConfig cc;
      cc.sentences_per_node = wj.value("sentences_per_node", cc.sentences_per_node);
      cc.words_per_sentence = wj.value("words_per_sentence", cc.words_per_sentence);
      cc.topic_vocabulary = wj.value("topic_vocabulary", cc.topic_vocabulary);
      cc.shared_vocabulary = wj.value("shared_vocabulary", cc.shared_vocabulary);
      cc.topic_probability = wj.value("topic_probability", cc.topic_probability);
      const auto ctx = context_corpus(*src.planted, cc, derive_seed(seed, {0x63747874}));
      const auto aliases = compile_alias_table(ctx.aliases);
      SegmentationConfig seg;
      seg.tokenizer = aliases.tokenizer();
      const auto corpus = load_corpus({ctx.document}, seg);
      const auto mentions = extract_mentions(corpus, aliases);
      WordEmbeddingConfig wc;
      wc.dim = wj.value("dim", 20u);
      wc.window = wj.value("window", wc.window);
      wc.min_count = wj.value("min_count", 1u);
      wc.epochs = wj.value("epochs", wc.epochs);
      wc.seed = seed;
      x = aligned_features(g, word_embeddings(corpus, mentions, wc).embedding, &missing);
    } else {
      throw InputError("graph '" + src.name + "' has no word_embedding: run `charnet embed word` first");
    }
    if (!missing.empty())
      warnings.push_back("word: " + std::to_string(missing.size()) + " nodes without a word vector get zeros");
    return x;
  }
  throw InputError("unknown feature source '" + feature + "'");
}

}  // namespace

ExperimentResult run_experiment(const nlohmann::json& config, const std::filesystem::path& base_dir) {
  ExperimentResult result;
  const std::uint64_t seed = config.value("seed", std::uint64_t{1});
  const auto tasks = config.value("tasks", std::vector<std::string>{"classification"});
  const auto methods = config.value("methods", std::vector<std::string>{"gcn"});
  const auto features = config.value("features", std::vector<std::string>{"ohe"});
  if (!config.contains("graphs") || config.at("graphs").empty()) throw InputError("experiment config lists no graphs");
  const std::size_t folds = config.value("folds", 10u);
  const std::size_t repeats = config.value("repeats", 10u);
  const double holdout = config.value("holdout", 0.1);

  std::size_t gi = 0;
  for (const auto& gspec : config.at("graphs")) {
    const GraphSource src = load_source(gspec, base_dir);
    for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
      const auto& task = tasks[ti];
      if (task != "classification" && task != "link_prediction") throw InputError("unknown task '" + task + "'");
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        const ModelKind model = model_kind_from_string(methods[mi]);
        for (std::size_t fi = 0; fi < features.size(); ++fi) {
          const std::uint64_t cell = derive_seed(seed, {gi, ti, mi, fi});
          std::vector<std::string> warnings;
          EvalReport report;
          if (task == "classification") {
            if (src.labels.empty())
              throw InputError("graph '" + src.name + "' has no labels: run `charnet mentions` first");
            const Matrix x = build_features(features[fi], src, src.graph, config, derive_seed(cell, {0}), warnings);
            ClassifierSpec spec;
            spec.model = model;
            spec.train = train_from_json(config.value("classification", nlohmann::json::object()),
                                         classification_defaults());
            spec.logistic.epochs = config.value("/logistic/epochs"_json_pointer, spec.logistic.epochs);
            spec.logistic.learning_rate = config.value("/logistic/lr"_json_pointer, spec.logistic.learning_rate);
            report = kfold_node_cv(src.graph, x, src.labels, folds, spec, cell);
          } else {
            LinkSpec spec;
            spec.model = model;
            spec.train = train_from_json(config.value("link_prediction", nlohmann::json::object()),
                                         link_prediction_defaults());
            spec.logistic.epochs = config.value("/logistic/epochs"_json_pointer, spec.logistic.epochs);
            spec.logistic.learning_rate = config.value("/logistic/lr"_json_pointer, spec.logistic.learning_rate);
            const std::string feature = features[fi];
            FeatureBuilder fb = [&](const CharacterGraph& g, std::uint64_t s) {
              return build_features(feature, src, g, config, s, warnings);
            };
            report = repeated_link_holdout(src.graph, fb, spec, repeats, holdout, cell);
          }
          report.graph = src.name;
          report.feature = features[fi];
          report.warnings.insert(report.warnings.end(), warnings.begin(), warnings.end());
          result.reports.push_back(std::move(report));
        }
      }
    }
    ++gi;
  }
  result.csv = results_to_csv(result.reports);
  return result;
}

}  // namespace charnet
