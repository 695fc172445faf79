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

// Labels, splits, cross-validation, metrics and the experiment grid runner.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "charnet/common.hpp"
#include "charnet/corpus.hpp"
#include "charnet/embed.hpp"
#include "charnet/gnn.hpp"
#include "charnet/graph.hpp"

namespace charnet {

struct LabelAssignment {
  /// canonical_id -> work id
  std::map<std::string, std::string> labels;
  /// canonical_id -> work id -> mention count
  std::map<std::string, std::map<std::string, std::size_t>> counts;
  /// Class order; class index i is works[i].
  std::vector<std::string> works;

  /// Class index per node, -1 for nodes without a label.
  std::vector<int> class_indices(const CharacterGraph& g) const;
};

/// label(c) = argmax_w ct(c, w) / sum_c' ct(c', w): each work's counts are
/// normalized by the total character mentions in that work, so long works do
/// not absorb every shared character. Ties go to the earlier work in
/// `work_order`. `characters`, when non-empty, lists ids that must be labeled
/// (zero mentions throws).
LabelAssignment derive_labels(const std::map<std::string, std::map<std::string, std::size_t>>& counts,
                              const std::vector<std::string>& work_order,
                              const std::vector<std::string>& characters = {});

nlohmann::json labels_to_json(const LabelAssignment& labels);
LabelAssignment labels_from_json(const nlohmann::json& j);

struct PrfScores {
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

/// Macro averages over the classes present in y_true.
PrfScores macro_prf(const std::vector<int>& y_true, const std::vector<int>& y_pred);

/// Mann-Whitney statistic; a tie counts one half.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct RocPoint {
  double fpr;
  double tpr;
  double threshold;
};

/// Threshold sweep from +inf downwards, one point per distinct score.
std::vector<RocPoint> roc_curve(const std::vector<double>& scores, const std::vector<int>& labels);
/// Trapezoidal area under roc_curve.
double roc_auc_trapezoid(const std::vector<double>& scores, const std::vector<int>& labels);

/// Fold id per node (-1 for unlabeled). Each class is shuffled and dealt
/// round robin with the deal position carried across classes, so folds are
/// stratified and differ in size by at most one.
std::vector<int> stratified_folds(const std::vector<int>& labels, std::size_t k, std::uint64_t seed);

struct EvalReport {
  std::string graph;
  std::string task;     ///< "classification" or "link_prediction"
  std::string method;   ///< gcn, gat, logistic
  std::string feature;  ///< ohe, node2vec, le, word, random
  std::vector<std::map<std::string, double>> folds;
  std::map<std::string, double> mean;
  /// Population standard deviation (ddof = 0).
  std::map<std::string, double> sd;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;

  /// Recomputes mean and sd from folds.
  void summarize();
};

nlohmann::json report_to_json(const EvalReport& r);
EvalReport report_from_json(const nlohmann::json& j);

/// How a node classifier is fitted inside each fold.
struct ClassifierSpec {
  ModelKind model = ModelKind::gcn;
  TrainConfig train = classification_defaults();
  LogisticConfig logistic;
};

/// k-fold CV over labeled nodes (labels[i] >= 0). Graph models see the whole
/// topology; only the held-out fold's labels are hidden.
EvalReport kfold_node_cv(const CharacterGraph& g, const Matrix& features, const std::vector<int>& labels,
                         std::size_t k, const ClassifierSpec& spec, std::uint64_t seed);

using NodePair = std::pair<std::size_t, std::size_t>;

struct EdgeSplit {
  CharacterGraph train;  ///< same node set as the input graph
  std::vector<NodePair> test_positive;
  std::vector<NodePair> test_negative;
  bool train_connected = true;
};

/// Holds out round(fraction * m) uniformly chosen edges and as many uniform
/// non-edges of the full graph.
EdgeSplit edge_split(const CharacterGraph& g, double holdout_fraction, std::uint64_t seed);

/// Hadamard features f_u * f_v, one row per pair.
Matrix hadamard_features(const Matrix& node_features, const std::vector<NodePair>& pairs);

/// Logistic regression on Hadamard features of every training edge plus as
/// many sampled training non-edges (never a test pair); AUC on the test pairs.
double embedding_link_baseline(const EmbeddingMatrix& embedding, const EdgeSplit& split, std::uint64_t seed,
                               const LogisticConfig& config = {});

/// Trains a GNN link predictor on split.train and scores the test pairs.
double gnn_link_auc(const EdgeSplit& split, const Matrix& features, const TrainConfig& config);

/// Builds node features for a graph; the seed makes learned features
/// reproducible. Graph embeddings see only the graph they are given.
using FeatureBuilder = std::function<Matrix(const CharacterGraph& g, std::uint64_t seed)>;

struct LinkSpec {
  ModelKind model = ModelKind::gcn;  ///< logistic selects the Hadamard baseline
  TrainConfig train = link_prediction_defaults();
  LogisticConfig logistic;
};

/// The 10% holdout repeated with `repeats` derived seeds; one AUC per repeat.
EvalReport repeated_link_holdout(const CharacterGraph& g, const FeatureBuilder& features, const LinkSpec& spec,
                                 std::size_t repeats, double holdout_fraction, std::uint64_t seed);

struct PlantedPartition {
  CharacterGraph graph;
  std::vector<int> labels;  ///< block per node, aligned with graph.nodes()
};

/// Blocks of equal size; node ids v000, v001, ... with block b holding
/// ids [b * size, (b + 1) * size).
PlantedPartition planted_partition(std::size_t blocks, std::size_t block_size, double p_in, double p_out,
                                   std::uint64_t seed);

/// The bundled benchmark: 3 blocks of 30 nodes, p_in 0.15, p_out 0.01.
PlantedPartition default_benchmark(std::uint64_t seed = 2024);

struct ContextCorpusConfig {
  std::size_t sentences_per_node = 12;
  std::size_t words_per_sentence = 8;
  std::size_t topic_vocabulary = 30;   ///< per block
  std::size_t shared_vocabulary = 90;
  /// Chance that a filler word comes from the node's own block vocabulary.
  double topic_probability = 0.3;
};

struct ContextCorpus {
  RawDocument document;
  /// alias surface -> canonical id
  std::vector<std::pair<std::string, std::string>> aliases;
};

/// Text in which each character only ever appears alone in a sentence among
/// filler words that lean weakly towards its block. Word vectors trained on
/// it carry context signal but no co-occurrence structure.
ContextCorpus context_corpus(const PlantedPartition& pp, const ContextCorpusConfig& config, std::uint64_t seed);

/// Uniform(-1, 1) vectors, for the no-signal control.
Matrix random_features(std::size_t n, std::size_t dim, std::uint64_t seed);

struct ExperimentResult {
  std::vector<EvalReport> reports;
  std::string csv;
};

/// Runs the grid described by `config` (see README). Relative paths resolve
/// against `base_dir`.
ExperimentResult run_experiment(const nlohmann::json& config, const std::filesystem::path& base_dir = ".");

std::string results_to_csv(const std::vector<EvalReport>& reports);

}  // namespace charnet
