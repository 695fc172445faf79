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

// Dense two-layer graph neural networks (GCN, single-head GAT), logistic
// regression, the Adam optimizer, and finite-difference gradient checks.
// Everything is full batch and single threaded, so a seed fixes every bit of
// the trained parameters.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "charnet/common.hpp"
#include "charnet/embed.hpp"
#include "charnet/graph.hpp"
#include "charnet/random.hpp"

namespace charnet {

enum class ModelKind { gcn, gat, logistic };

std::string to_string(ModelKind k);
ModelKind model_kind_from_string(std::string_view s);

struct Tensor {
  std::string name;
  Matrix value;
};

/// Named parameter tensors. Biases and attention vectors are 1 x width rows.
struct ModelParams {
  ModelKind kind = ModelKind::gcn;
  std::vector<Tensor> tensors;
  std::uint64_t seed = 0;

  const Matrix& at(std::string_view name) const;
  Matrix& at(std::string_view name);
  std::size_t parameter_count() const;
};

/// Gradients aligned index-for-index with ModelParams::tensors.
using Gradients = std::vector<Matrix>;

/// Glorot-uniform weights, zero biases.
ModelParams init_gcn(std::size_t in_dim, std::size_t hidden, std::size_t out_dim, std::uint64_t seed);
ModelParams init_gat(std::size_t in_dim, std::size_t hidden, std::size_t out_dim, std::uint64_t seed);
ModelParams init_logistic(std::size_t in_dim, std::size_t classes, std::uint64_t seed);

/// D~^-1/2 (A + I) D~^-1/2 with binary or co-occurrence-weighted A.
Matrix normalize_adjacency(const CharacterGraph& g, bool weighted);

/// Per-node attention neighbourhood N(u) + {u} with edge weights (self = 1).
struct AttentionGraph {
  std::vector<std::vector<std::pair<std::size_t, double>>> neighborhoods;
  static AttentionGraph build(const CharacterGraph& g, bool weighted);
};

struct GcnOutput {
  Matrix output;  ///< A H1 W1 + b1
  Matrix hidden;  ///< H1 = relu(A X W0 + b0)
};

GcnOutput gcn_forward(const ModelParams& params, const Matrix& features, const Matrix& norm_adj);

struct GatOutput {
  Matrix output;
  Matrix hidden;
  /// Dense n x n attention coefficients for each layer.
  std::vector<Matrix> attention;
};

/// e_uv = leaky_relu(a_src . W h_u + a_dst . W h_v), slope 0.2, softmax over
/// N(u) + {u}; in weighted mode the softmax terms are scaled by edge weight.
/// Layer 1 applies relu, layer 2 is linear.
GatOutput gat_forward(const ModelParams& params, const Matrix& features, const CharacterGraph& g, bool weighted);

/// Shared evaluation context for the differentiable graph models.
struct ModelInputs {
  const Matrix* features = nullptr;
  Matrix norm_adj;           ///< GCN
  AttentionGraph attention;  ///< GAT
  static ModelInputs build(const CharacterGraph& g, const Matrix& features, ModelKind kind, bool weighted);
};

/// Mean softmax cross-entropy over masked rows. Writes d loss / d logits.
double softmax_cross_entropy(const Matrix& logits, const std::vector<int>& labels, const std::vector<bool>& mask,
                             Matrix* grad);

struct LabeledPair {
  std::size_t u;
  std::size_t v;
  double target;  ///< 1 for an edge, 0 for a sampled non-edge
};

/// Mean binary cross-entropy with logits on Hadamard scores z_u . z_v.
double pair_bce_with_logits(const Matrix& node_vectors, const std::vector<LabeledPair>& pairs, Matrix* grad);

/// Which objective a loss evaluation uses.
struct Objective {
  enum class Task { classification, link_prediction } task = Task::classification;
  std::vector<int> labels;
  std::vector<bool> mask;
  std::vector<LabeledPair> pairs;
};

/// Loss and (optionally) analytic gradients for a GCN or GAT model.
double graph_model_loss(const ModelParams& params, const ModelInputs& inputs, const Objective& objective,
                        Gradients* grads, double dropout = 0.0, std::uint64_t dropout_seed = 0);

/// Softmax (classes > 2) or sigmoid (classes == 2) regression loss.
double logistic_loss(const ModelParams& params, const Matrix& features, const std::vector<int>& labels,
                     Gradients* grads);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;
};

struct AdamState {
  std::vector<Matrix> m;
  std::vector<Matrix> v;
  std::size_t step = 0;
};

/// One bias-corrected Adam update in place. Non-finite gradients throw
/// DomainError naming the parameter.
void adam_step(ModelParams& params, const Gradients& grads, AdamState& state, const AdamConfig& config);

struct GradCheckInstance {
  CharacterGraph graph;
  Matrix features;
  ModelParams params;
  Objective objective;
  bool weighted = false;
};

/// Random instance: n nodes, random connected-ish graph, classification
/// objective over all nodes.
GradCheckInstance make_gradcheck_instance(ModelKind kind, std::size_t n, std::uint64_t seed,
                                          Objective::Task task = Objective::Task::classification);

/// Max over parameters of |analytic - numeric| / max(|analytic|, |numeric|, 1e-7)
/// with central differences of step h.
double gradient_check(ModelKind kind, const GradCheckInstance& instance, double h = 1e-5);

struct LogisticConfig {
  std::size_t epochs = 200;
  double learning_rate = 0.05;
  std::uint64_t seed = 1;
};

struct LogisticModel {
  ModelParams params;
  std::size_t classes = 0;
  std::vector<double> loss_history;
};

/// Full-batch Adam. Labels are 0..C-1; fewer than 2 distinct labels throws.
LogisticModel logistic_fit(const Matrix& features, const std::vector<int>& labels, const LogisticConfig& config);

/// n x C class probabilities; rows sum to 1.
Matrix logistic_predict(const LogisticModel& model, const Matrix& features);

struct TrainConfig {
  ModelKind model = ModelKind::gcn;
  std::size_t epochs = 5000;
  double learning_rate = 1e-4;
  std::size_t hidden = 20;
  /// Output width for link prediction.
  std::size_t embedding_dim = 20;
  bool weighted = false;
  double dropout = 0.0;
  double weight_decay = 0.0;
  std::uint64_t seed = 1;
};

/// Defaults: 5000 epochs at lr 1e-4 for classification, 15000 epochs at
/// lr 1e-3 for link prediction.
TrainConfig classification_defaults();
TrainConfig link_prediction_defaults();

struct NodeClassifierResult {
  ModelParams params;
  std::vector<int> predictions;
  Matrix probabilities;
  Matrix hidden;
  std::vector<double> loss_history;
};

/// Cross-entropy on the train mask only; topology of all nodes is visible.
NodeClassifierResult train_node_classifier(const CharacterGraph& g, const Matrix& features,
                                           const std::vector<int>& labels, const std::vector<bool>& train_mask,
                                           const TrainConfig& config);

struct LinkPredictor {
  ModelParams params;
  Matrix node_vectors;  ///< final-layer vectors
  Matrix hidden;
  std::vector<double> loss_history;

  /// Logit z_u . z_v; symmetric in (u, v).
  double score(std::size_t u, std::size_t v) const;
};

/// Trains on every edge of g_train against an equal number of non-edges
/// resampled each epoch.
LinkPredictor train_link_predictor(const CharacterGraph& g_train, const Matrix& features, const TrainConfig& config);

/// Uniform non-edges of g (u < v), distinct, avoiding `exclude` pairs.
std::vector<std::pair<std::size_t, std::size_t>> sample_non_edges(
    const CharacterGraph& g, std::size_t count, Rng& rng,
    const std::vector<std::pair<std::size_t, std::size_t>>& exclude = {}, bool distinct = true);

/// n x n identity.
Matrix one_hot_features(std::size_t n);

/// Embedding rows aligned to g.nodes(). Nodes without a vector get zeros and
/// are reported in `missing` when given, otherwise they throw.
Matrix aligned_features(const CharacterGraph& g, const EmbeddingMatrix& e,
                        std::vector<std::string>* missing = nullptr);

nlohmann::json params_to_json(const ModelParams& params);
ModelParams params_from_json(const nlohmann::json& j);

}  // namespace charnet
