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

// Latent-space representations of words and characters: a skipgram trainer
// with negative sampling, corpus word vectors, node2vec walks and embeddings,
// Laplacian Eigenmaps, and a PCA projection for plot data.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "charnet/characters.hpp"
#include "charnet/common.hpp"
#include "charnet/corpus.hpp"
#include "charnet/graph.hpp"

namespace charnet {

enum class Provenance { word_context, node2vec, laplacian_eigenmap, gnn_hidden };

std::string to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

struct EmbeddingMatrix {
  std::vector<std::string> entity_ids;
  Matrix vectors;  ///< one row per entity
  Provenance provenance = Provenance::word_context;
  nlohmann::json config = nlohmann::json::object();

  std::size_t dim() const { return static_cast<std::size_t>(vectors.cols()); }
  std::size_t size() const { return entity_ids.size(); }
  /// Row index of an entity, or npos.
  std::size_t row_of(std::string_view id) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Throws DomainError when rows/ids disagree, d == 0, or a value is not finite.
void validate(const EmbeddingMatrix& e);

struct SkipgramConfig {
  std::size_t dim = 100;
  std::size_t window = 5;
  std::size_t negative_samples = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
  std::size_t min_count = 1;
  std::uint64_t seed = 1;
};

struct SkipgramResult {
  EmbeddingMatrix embedding;
  /// Mean negative-sampling loss per (target, context) pair, one per epoch.
  std::vector<double> epoch_losses;
  std::size_t training_pairs = 0;
};

/// Skipgram with negative sampling drawn from the unigram^(3/4) distribution.
/// Vocabulary is ordered by descending count, then lexicographically; the
/// context window is shrunk uniformly at random per target as in word2vec.
/// Single-threaded so a seed fixes the result bit for bit.
SkipgramResult skipgram_train(const std::vector<std::vector<std::string>>& sequences,
                              const SkipgramConfig& config);

struct WordEmbeddingConfig {
  std::size_t dim = 300;
  std::size_t window = 5;
  std::size_t min_count = 5;
  std::size_t negative_samples = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
  std::uint64_t seed = 1;
  /// Replace each resolved mention by its canonical id as one token.
  bool resolve_mentions = true;
};

/// Sentence token sequences for word-vector training (punctuation dropped).
std::vector<std::vector<std::string>> word_sequences(const TokenizedCorpus& corpus,
                                                     const std::vector<MentionRecord>& mentions,
                                                     bool resolve_mentions);

SkipgramResult word_embeddings(const TokenizedCorpus& corpus, const std::vector<MentionRecord>& mentions,
                               const WordEmbeddingConfig& config = {});

struct WalkConfig {
  double p = 1.0;
  double q = 1.0;
  std::size_t walks_per_node = 10;
  std::size_t walk_length = 80;
  std::uint64_t seed = 1;
  bool weighted = false;
};

void validate(const WalkConfig& cfg);

/// Successor distribution from `current` having arrived from `previous`
/// (std::nullopt for the first step): weight(current, x) * bias where bias is
/// 1/p for x == previous, 1 for x adjacent to previous, 1/q otherwise.
/// Pairs are (neighbor index, probability), in neighbor order.
std::vector<std::pair<std::size_t, double>> transition_probabilities(
    const CharacterGraph& g, std::optional<std::size_t> previous, std::size_t current, const WalkConfig& cfg);

/// walks_per_node walks from every node, ordered by (round, start node). Each
/// walk draws from its own stream seeded by (seed, node, round).
std::vector<std::vector<std::size_t>> node2vec_walks(const CharacterGraph& g, const WalkConfig& cfg);

struct Node2VecConfig {
  WalkConfig walk;
  std::size_t dim = 20;
  std::size_t window = 10;
  std::size_t negative_samples = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
};

/// Rows follow g.nodes().
SkipgramResult node2vec(const CharacterGraph& g, const Node2VecConfig& config);

struct LaplacianEigenmapResult {
  EmbeddingMatrix embedding;        ///< rows = nodes of the embedded component
  std::vector<double> eigenvalues;  ///< the dim returned eigenvalues, ascending
  std::size_t zero_multiplicity = 0;
  bool largest_component_only = false;
};

/// Symmetric normalized Laplacian L = I - D^-1/2 A D^-1/2 (binary adjacency
/// unless weighted). Returns eigenvectors of the dim smallest nonzero
/// eigenvalues; the first nonzero entry of each vector is positive. A
/// disconnected graph is embedded on its largest component.
LaplacianEigenmapResult laplacian_eigenmap(const CharacterGraph& g, std::size_t dim = 20, bool weighted = false);

/// The normalized Laplacian itself, rows/cols following g.nodes().
Matrix normalized_laplacian(const CharacterGraph& g, bool weighted = false);

/// PCA onto the top-2 principal components of the centred vectors.
std::vector<Point> project_2d(const EmbeddingMatrix& e);

/// CSV: entity_id, v_1..v_d.
std::string embedding_to_csv(const EmbeddingMatrix& e);
EmbeddingMatrix embedding_from_csv(std::string_view text, Provenance provenance);
/// Sidecar JSON: provenance, dim, rows, config.
nlohmann::json embedding_sidecar(const EmbeddingMatrix& e);

}  // namespace charnet
