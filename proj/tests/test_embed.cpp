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

#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "charnet/characters.hpp"
#include "charnet/cooccur.hpp"
#include "charnet/corpus.hpp"
#include "charnet/embed.hpp"
#include "charnet/graph.hpp"
#include "charnet/random.hpp"

using namespace charnet;

namespace {

CharacterGraph from(std::vector<WeightedEdge> e) {
  EdgeList l;
  l.entries = std::move(e);
  return build_graph(l);
}

double cosine(const Matrix& m, std::size_t a, std::size_t b) {
  return m.row(a).dot(m.row(b)) / (m.row(a).norm() * m.row(b).norm());
}

// Two 5-cliques, a0..a4 and b0..b4, joined by a0-b0.
CharacterGraph barbell() {
  std::vector<WeightedEdge> e;
  for (char side : {'a', 'b'})
    for (int i = 0; i < 5; ++i)
      for (int j = i + 1; j < 5; ++j) e.push_back({side + std::to_string(i), side + std::to_string(j), 1});
  e.push_back({"a0", "b0", 1});
  return from(e);
}

CharacterGraph random_graph(std::size_t n, double p, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("n" + std::to_string(10 + i));
  std::vector<WeightedEdge> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.uniform() < p) e.push_back({ids[i], ids[j], std::int64_t(1 + rng.below(4))});
  return CharacterGraph(ids, e);
}

}  // namespace

TEST(Skipgram, AdjacentTokensAreCloser) {
  std::vector<std::vector<std::string>> seqs;
  Rng rng(1);
  const std::vector<std::string> fill = {"p", "q", "r", "s", "t", "u", "v", "w"};
  for (int i = 0; i < 400; ++i) {
    seqs.push_back({fill[rng.below(4)], "X", "Y", fill[rng.below(4)]});
    seqs.push_back({fill[4 + rng.below(4)], "Z", fill[4 + rng.below(4)], fill[4 + rng.below(4)]});
  }
  SkipgramConfig cfg;
  cfg.dim = 16;
  cfg.window = 2;
  cfg.seed = 5;
  const auto r = skipgram_train(seqs, cfg);
  const auto& e = r.embedding;
  const auto x = e.row_of("X"), y = e.row_of("Y"), z = e.row_of("Z");
  EXPECT_GT(cosine(e.vectors, x, y), cosine(e.vectors, x, z));
  EXPECT_LT(r.epoch_losses.back(), r.epoch_losses.front());
  const auto again = skipgram_train(seqs, cfg);
  EXPECT_EQ(again.embedding.vectors, e.vectors);
}

TEST(Skipgram, DegenerateInputs) {
  SkipgramConfig cfg;
  EXPECT_THROW(skipgram_train({{"a", "a", "a"}}, cfg), DomainError);
  EXPECT_THROW(skipgram_train({}, cfg), DomainError);
  cfg.min_count = 10;
  EXPECT_THROW(skipgram_train({{"a", "b"}}, cfg), DomainError);
}

TEST(WordEmbeddings, Defaults) {
  WordEmbeddingConfig cfg;
  EXPECT_EQ(cfg.dim, 300u);
  EXPECT_EQ(cfg.window, 5u);
  EXPECT_EQ(cfg.min_count, 5u);
  EXPECT_EQ(cfg.negative_samples, 5u);
  EXPECT_EQ(cfg.epochs, 5u);
}

TEST(WordEmbeddings, MinCountOneKeepsAllWords) {
  const auto c = load_corpus({{"w", "w", "one two three four five six seven eight nine ten", ""}});
  WordEmbeddingConfig cfg;
  cfg.min_count = 1;
  cfg.dim = 8;
  const auto r = word_embeddings(c, {}, cfg);
  EXPECT_EQ(r.embedding.size(), 10u);
  EXPECT_EQ(r.embedding.dim(), 8u);
}

TEST(WordEmbeddings, FixtureCharactersInVocabulary) {
  const auto dir = std::filesystem::path(CHARNET_DATA_DIR) / "fixture";
  const auto corpus = load_corpus(read_manifest(dir / "manifest.json"));
  const auto table = compile_alias_table(read_alias_file(dir / "aliases.tsv"));
  const auto mentions = extract_mentions(corpus, table);
  WordEmbeddingConfig cfg;
  cfg.min_count = 1;
  cfg.dim = 10;
  const auto r = word_embeddings(corpus, mentions, cfg);
  for (const auto& m : mentions) EXPECT_NE(r.embedding.row_of(m.canonical_id), EmbeddingMatrix::npos) << m.canonical_id;
  // "Bilbo Baggins" collapses into the canonical token
  const auto seqs = word_sequences(corpus, mentions, true);
  for (const auto& s : seqs)
    for (const auto& w : s) EXPECT_NE(w, "Baggins");
}

TEST(Walks, DeepWalkWhenUnbiased) {
  const auto g = from({{"A", "B", 1}, {"B", "C", 3}, {"B", "D", 1}});
  WalkConfig cfg;
  cfg.weighted = true;
  const auto b = g.index_of("B");
  const auto probs = transition_probabilities(g, g.index_of("A"), b, cfg);
  for (const auto& [x, pr] : probs) EXPECT_NEAR(pr, double(g.weight(b, x)) / 5.0, 1e-12);
}

TEST(Walks, ReturnVersusOutward) {
  const auto g = from({{"A", "B", 1}, {"B", "C", 1}, {"C", "D", 1}});
  WalkConfig cfg;
  cfg.p = 1;
  cfg.q = 4;
  // bias 1/p = 1 for A, 1/q = 0.25 for C; normalized 0.8 / 0.2
  for (const auto& [x, pr] : transition_probabilities(g, g.index_of("A"), g.index_of("B"), cfg))
    EXPECT_NEAR(pr, g.node(x) == "A" ? 0.8 : 0.2, 1e-12);
}

TEST(Walks, TriangleIsUniform) {
  const auto g = from({{"A", "B", 1}, {"B", "C", 1}, {"A", "C", 1}});
  WalkConfig cfg;
  cfg.p = 1;
  cfg.q = 4;
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t v = 0; v < 3; ++v) {
      if (t == v) continue;
      for (const auto& [x, pr] : transition_probabilities(g, t, v, cfg)) EXPECT_NEAR(pr, 0.5, 1e-12);
    }
}

TEST(Walks, ProbabilitiesSumToOne) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto g = random_graph(9, 0.4, seed);
    Rng rng(seed);
    WalkConfig cfg;
    cfg.p = 0.25 + 4 * rng.uniform();
    cfg.q = 0.25 + 4 * rng.uniform();
    cfg.weighted = seed % 2;
    for (std::size_t v = 0; v < g.node_count(); ++v)
      for (const auto& nb : g.neighbors(v)) {
        double s = 0;
        for (const auto& [x, pr] : transition_probabilities(g, nb.index, v, cfg)) s += pr;
        EXPECT_NEAR(s, 1.0, 1e-12);
      }
  }
}

TEST(Walks, ShapeDeterminismAndIsolates) {
  CharacterGraph g({"A", "B", "C", "Z"}, {{"A", "B", 1}, {"B", "C", 1}});
  WalkConfig cfg;
  cfg.walks_per_node = 3;
  cfg.walk_length = 6;
  const auto w = node2vec_walks(g, cfg);
  ASSERT_EQ(w.size(), 12u);
  for (const auto& walk : w) {
    if (walk.front() == g.index_of("Z")) EXPECT_EQ(walk.size(), 1u);
    else EXPECT_EQ(walk.size(), 6u);
    for (std::size_t i = 1; i < walk.size(); ++i) EXPECT_TRUE(g.has_edge(walk[i - 1], walk[i]));
  }
  EXPECT_EQ(node2vec_walks(g, cfg), w);
  cfg.q = 0;
  EXPECT_THROW(node2vec_walks(g, cfg), DomainError);
}

TEST(Node2Vec, CliquesSeparate) {
  const auto g = barbell();
  Node2VecConfig cfg;
  EXPECT_EQ(cfg.dim, 20u);
  for (auto [p, q] : std::vector<std::pair<double, double>>{{1, 4}, {4, 1}, {1, 1}}) {
    cfg.walk.p = p;
    cfg.walk.q = q;
    const auto r = node2vec(g, cfg);
    const auto& v = r.embedding.vectors;
    double intra = 0, inter = 0;
    int ni = 0, nx = 0;
    for (std::size_t i = 0; i < 10; ++i)
      for (std::size_t j = i + 1; j < 10; ++j) {
        const bool same = g.node(i)[0] == g.node(j)[0];
        (same ? intra : inter) += cosine(v, i, j);
        ++(same ? ni : nx);
      }
    EXPECT_GT(intra / ni, inter / nx) << "p=" << p << " q=" << q;
  }
}

TEST(Eigenmap, TriangleEigenvalues) {
  const auto g = from({{"A", "B", 1}, {"B", "C", 1}, {"A", "C", 1}});
  const Eigen::MatrixXd L = normalized_laplacian(g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> oracle(L);
  EXPECT_NEAR(oracle.eigenvalues()(0), 0.0, 1e-12);
  EXPECT_NEAR(oracle.eigenvalues()(1), 1.5, 1e-12);
  EXPECT_NEAR(oracle.eigenvalues()(2), 1.5, 1e-12);
  const auto r = laplacian_eigenmap(g, 2);
  ASSERT_EQ(r.eigenvalues.size(), 2u);
  EXPECT_NEAR(r.eigenvalues[0], 1.5, 1e-10);
  EXPECT_NEAR(r.eigenvalues[1], 1.5, 1e-10);
  EXPECT_EQ(r.zero_multiplicity, 1u);
  EXPECT_THROW(laplacian_eigenmap(g, 3), DomainError);
}

TEST(Eigenmap, ResidualsAndSigns) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = largest_component(random_graph(14, 0.35, seed));
    if (g.node_count() < 4) continue;
    for (bool weighted : {false, true}) {
      const std::size_t dim = std::min<std::size_t>(5, g.node_count() - 1);
      const auto r = laplacian_eigenmap(g, dim, weighted);
      const Matrix L = normalized_laplacian(g, weighted);
      for (std::size_t k = 0; k < dim; ++k) {
        const Eigen::VectorXd v = r.embedding.vectors.col(k);
        EXPECT_LT((L * v - r.eigenvalues[k] * v).lpNorm<Eigen::Infinity>(), 1e-8);
        EXPECT_GT(r.eigenvalues[k], 1e-9);
        for (Eigen::Index i = 0; i < v.size(); ++i)
          if (std::abs(v(i)) > 1e-12) {
            EXPECT_GT(v(i), 0.0);
            break;
          }
      }
      // columns are orthogonal to the null vector D^1/2 1
      Eigen::VectorXd null(g.node_count());
      for (std::size_t i = 0; i < g.node_count(); ++i) {
        double d = 0;
        for (const auto& nb : g.neighbors(i)) d += weighted ? double(nb.weight) : 1.0;
        null(Eigen::Index(i)) = std::sqrt(d);
      }
      EXPECT_LT((L * null).norm(), 1e-10);
      for (std::size_t k = 0; k < dim; ++k) EXPECT_NEAR(r.embedding.vectors.col(k).dot(null), 0.0, 1e-8);
    }
  }
}

TEST(Eigenmap, DisjointTrianglesFlagged) {
  const auto g = from({{"A", "B", 1}, {"B", "C", 1}, {"A", "C", 1}, {"X", "Y", 1}, {"Y", "Z", 1}, {"X", "Z", 1}});
  const auto r = laplacian_eigenmap(g, 1);
  EXPECT_EQ(r.zero_multiplicity, 2u);
  EXPECT_TRUE(r.largest_component_only);
  EXPECT_EQ(r.embedding.entity_ids, (std::vector<std::string>{"A", "B", "C"}));
}

TEST(Project2d, TwoDimensionalPreservesDistances) {
  EmbeddingMatrix e;
  Rng rng(2);
  for (int i = 0; i < 12; ++i) e.entity_ids.push_back("e" + std::to_string(i));
  e.vectors.resize(12, 2);
  for (int i = 0; i < 12; ++i) e.vectors.row(i) << rng.uniform(-3, 3), rng.uniform(-1, 1);
  const auto pts = project_2d(e);
  for (int i = 0; i < 12; ++i)
    for (int j = i + 1; j < 12; ++j) {
      const double d0 = (e.vectors.row(i) - e.vectors.row(j)).norm();
      const double d1 = std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
      EXPECT_NEAR(d0, d1, 1e-9);
    }
}

TEST(Project2d, IdenticalAndErrors) {
  EmbeddingMatrix e;
  e.entity_ids = {"a", "b", "c"};
  e.vectors = Matrix::Constant(3, 4, 0.7);
  for (const auto& p : project_2d(e)) {
    EXPECT_NEAR(p.x, 0.0, 1e-12);
    EXPECT_NEAR(p.y, 0.0, 1e-12);
  }
  e.entity_ids = {"a"};
  e.vectors = Matrix::Ones(1, 4);
  EXPECT_THROW(project_2d(e), DomainError);
}

TEST(Project2d, BeatsRandomProjections) {
  EmbeddingMatrix e;
  Rng rng(8);
  const int n = 60, d = 20;
  e.vectors.resize(n, d);
  for (int i = 0; i < n; ++i) {
    e.entity_ids.push_back("e" + std::to_string(i));
    for (int k = 0; k < d; ++k) e.vectors(i, k) = rng.uniform(-1, 1) * (1.0 + k % 5);
  }
  const auto pts = project_2d(e);
  double pca = 0, mx = 0, my = 0;
  for (const auto& p : pts) mx += p.x / n, my += p.y / n;
  for (const auto& p : pts) pca += (p.x - mx) * (p.x - mx) + (p.y - my) * (p.y - my);
  const Matrix centred = e.vectors.rowwise() - e.vectors.colwise().mean();
  for (int t = 0; t < 100; ++t) {
    Eigen::MatrixXd R(d, 2);
    for (int i = 0; i < d; ++i) R(i, 0) = rng.uniform(-1, 1), R(i, 1) = rng.uniform(-1, 1);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(R);
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(d, 2);
    EXPECT_GE(pca + 1e-9, (centred * Q).squaredNorm());
  }
}

TEST(EmbeddingCsv, RoundTrip) {
  const auto r = node2vec(barbell(), Node2VecConfig{});
  const auto back = embedding_from_csv(embedding_to_csv(r.embedding), Provenance::node2vec);
  EXPECT_EQ(back.entity_ids, r.embedding.entity_ids);
  EXPECT_TRUE(back.vectors.isApprox(r.embedding.vectors, 1e-15));
  const auto side = embedding_sidecar(r.embedding);
  EXPECT_EQ(side["provenance"], "node2vec");
  EXPECT_EQ(side["dim"], 20);
}
