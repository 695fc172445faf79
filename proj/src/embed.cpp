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

#include "charnet/embed.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include <Eigen/Eigenvalues>

#include "charnet/csv.hpp"
#include "charnet/random.hpp"
#include "utf8.hpp"

namespace charnet {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::word_context: return "word_context";
    case Provenance::node2vec: return "node2vec";
    case Provenance::laplacian_eigenmap: return "laplacian_eigenmap";
    case Provenance::gnn_hidden: return "gnn_hidden";
  }
  return "unknown";
}

Provenance provenance_from_string(std::string_view s) {
  if (s == "word_context") return Provenance::word_context;
  if (s == "node2vec") return Provenance::node2vec;
  if (s == "laplacian_eigenmap") return Provenance::laplacian_eigenmap;
  if (s == "gnn_hidden") return Provenance::gnn_hidden;
  throw InputError("unknown embedding provenance '" + std::string(s) + "'");
}

std::size_t EmbeddingMatrix::row_of(std::string_view id) const {
  for (std::size_t i = 0; i < entity_ids.size(); ++i)
    if (entity_ids[i] == id) return i;
  return npos;
}

void validate(const EmbeddingMatrix& e) {
  if (static_cast<std::size_t>(e.vectors.rows()) != e.entity_ids.size())
    throw DomainError("embedding has " + std::to_string(e.vectors.rows()) + " rows for " +
                      std::to_string(e.entity_ids.size()) + " entities");
  if (e.vectors.cols() == 0) throw DomainError("embedding dimension must be positive");
  if (!e.vectors.allFinite()) throw DomainError("embedding contains non-finite values");
}

namespace {

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(sigmoid(x)) without overflow.
inline double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

}  // namespace

SkipgramResult skipgram_train(const std::vector<std::vector<std::string>>& sequences,
                              const SkipgramConfig& config) {
  if (sequences.empty()) throw DomainError("skipgram needs at least one sequence");
  if (config.dim < 1) throw DomainError("skipgram dim must be >= 1");
  if (config.window < 1) throw DomainError("skipgram window must be >= 1");
  if (config.epochs < 1) throw DomainError("skipgram epochs must be >= 1");
  if (!(config.learning_rate > 0)) throw DomainError("skipgram learning rate must be positive");

  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& seq : sequences)
    for (const auto& tok : seq) ++counts[tok];
  std::vector<std::pair<std::string, std::size_t>> vocab;
  for (auto& [tok, c] : counts)
    if (c >= config.min_count) vocab.emplace_back(tok, c);
  if (vocab.empty()) throw DomainError("vocabulary is empty after applying min_count");
  if (vocab.size() < 2) throw DomainError("vocabulary of size 1 gives no negative samples to train against");
  std::sort(vocab.begin(), vocab.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::unordered_map<std::string, std::size_t> id_of;
  for (std::size_t i = 0; i < vocab.size(); ++i) id_of[vocab[i].first] = i;

  std::vector<std::vector<std::size_t>> encoded;
  std::size_t total_tokens = 0;
  for (const auto& seq : sequences) {
    std::vector<std::size_t> ids;
    for (const auto& tok : seq) {
      auto it = id_of.find(tok);
      if (it != id_of.end()) ids.push_back(it->second);
    }
    total_tokens += ids.size();
    if (ids.size() >= 2) encoded.push_back(std::move(ids));
  }
  if (encoded.empty()) throw DomainError("no (target, context) pairs: every sequence has fewer than 2 tokens");

  // Unigram^(3/4) cumulative distribution for negative sampling.
  std::vector<double> cdf(vocab.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    acc += std::pow(static_cast<double>(vocab[i].second), 0.75);
    cdf[i] = acc;
  }
  for (auto& c : cdf) c /= acc;

  const std::size_t V = vocab.size();
  const std::size_t d = config.dim;
  Rng rng(config.seed);
  Matrix syn0(static_cast<Eigen::Index>(V), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < syn0.rows(); ++i)
    for (Eigen::Index j = 0; j < syn0.cols(); ++j) syn0(i, j) = (rng.uniform() - 0.5) / static_cast<double>(d);
  Matrix syn1 = Matrix::Zero(static_cast<Eigen::Index>(V), static_cast<Eigen::Index>(d));
  std::vector<double> grad_in(d);

  auto sample_negative = [&]() {
    const double u = rng.uniform();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), V - 1);
  };

  SkipgramResult result;
  const double total_work = static_cast<double>(total_tokens) * static_cast<double>(config.epochs) + 1.0;
  double processed = 0.0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    double loss = 0.0;
    std::size_t pairs = 0;
    for (const auto& seq : encoded) {
      for (std::size_t i = 0; i < seq.size(); ++i) {
        const double lr = config.learning_rate * std::max(1e-4, 1.0 - processed / total_work);
        processed += 1.0;
        const std::size_t reduced = config.window - rng.below(config.window);
        const std::size_t lo = i >= reduced ? i - reduced : 0;
        const std::size_t hi = std::min(seq.size() - 1, i + reduced);
        double* in = syn0.row(static_cast<Eigen::Index>(seq[i])).data();
        for (std::size_t j = lo; j <= hi; ++j) {
          if (j == i) continue;
          std::fill(grad_in.begin(), grad_in.end(), 0.0);
          const std::size_t positive = seq[j];
          for (std::size_t s = 0; s <= config.negative_samples; ++s) {
            std::size_t target;
            double label;
            if (s == 0) {
              target = positive;
              label = 1.0;
            } else {
              target = sample_negative();
              if (target == positive) continue;
              label = 0.0;
            }
            double* out = syn1.row(static_cast<Eigen::Index>(target)).data();
            double dot = 0.0;
            for (std::size_t k = 0; k < d; ++k) dot += in[k] * out[k];
            loss -= label > 0 ? log_sigmoid(dot) : log_sigmoid(-dot);
            const double g = (label - sigmoid(dot)) * lr;
            for (std::size_t k = 0; k < d; ++k) grad_in[k] += g * out[k];
            for (std::size_t k = 0; k < d; ++k) out[k] += g * in[k];
          }
          for (std::size_t k = 0; k < d; ++k) in[k] += grad_in[k];
          ++pairs;
        }
      }
    }
    result.epoch_losses.push_back(pairs ? loss / static_cast<double>(pairs) : 0.0);
    result.training_pairs += pairs;
  }

  result.embedding.provenance = Provenance::word_context;
  for (const auto& [tok, c] : vocab) result.embedding.entity_ids.push_back(tok);
  result.embedding.vectors = std::move(syn0);
  result.embedding.config = {{"dim", config.dim},
                             {"window", config.window},
                             {"negative_samples", config.negative_samples},
                             {"epochs", config.epochs},
                             {"learning_rate", config.learning_rate},
                             {"min_count", config.min_count},
                             {"seed", config.seed}};
  return result;
}

namespace {

bool is_word_token(std::string_view s) {
  for (const auto& cp : utf8::decode(s)) {
    const char32_t c = cp.cp;
    if ((c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return true;
    if (c >= 0xC0 && !(c >= 0x2000 && c <= 0x206F) && c != 0xD7 && c != 0xF7) return true;
  }
  return false;
}

}  // namespace

std::vector<std::vector<std::string>> word_sequences(const TokenizedCorpus& corpus,
                                                     const std::vector<MentionRecord>& mentions,
                                                     bool resolve_mentions) {
  std::vector<const MentionRecord*> starting(corpus.tokens.size(), nullptr);
  if (resolve_mentions)
    for (const auto& m : mentions) starting[m.tokens.begin] = &m;
  std::vector<std::vector<std::string>> out;
  for (const Range& s : corpus.sentences) {
    std::vector<std::string> seq;
    for (std::size_t t = s.begin; t < s.end;) {
      if (const MentionRecord* m = starting[t]) {
        seq.push_back(m->canonical_id);
        t = m->tokens.end;
        continue;
      }
      if (is_word_token(corpus.tokens[t].surface)) seq.push_back(corpus.tokens[t].surface);
      ++t;
    }
    if (!seq.empty()) out.push_back(std::move(seq));
  }
  return out;
}

SkipgramResult word_embeddings(const TokenizedCorpus& corpus, const std::vector<MentionRecord>& mentions,
                               const WordEmbeddingConfig& config) {
  if (corpus.tokens.empty()) throw DomainError("word embeddings need a non-empty corpus");
  SkipgramConfig sg;
  sg.dim = config.dim;
  sg.window = config.window;
  sg.min_count = config.min_count;
  sg.negative_samples = config.negative_samples;
  sg.epochs = config.epochs;
  sg.learning_rate = config.learning_rate;
  sg.seed = config.seed;
  SkipgramResult r = skipgram_train(word_sequences(corpus, mentions, config.resolve_mentions), sg);
  r.embedding.provenance = Provenance::word_context;
  r.embedding.config["resolve_mentions"] = config.resolve_mentions;
  return r;
}

void validate(const WalkConfig& cfg) {
  if (!(cfg.p > 0) || !(cfg.q > 0)) throw DomainError("node2vec p and q must be positive");
  if (cfg.walks_per_node < 1) throw DomainError("walks_per_node must be >= 1");
  if (cfg.walk_length < 2) throw DomainError("walk_length must be >= 2");
}

std::vector<std::pair<std::size_t, double>> transition_probabilities(
    const CharacterGraph& g, std::optional<std::size_t> previous, std::size_t current, const WalkConfig& cfg) {
  std::vector<std::pair<std::size_t, double>> out;
  double total = 0.0;
  for (const auto& nb : g.neighbors(current)) {
    double w = cfg.weighted ? static_cast<double>(nb.weight) : 1.0;
    if (previous) {
      if (nb.index == *previous) {
        w /= cfg.p;
      } else if (!g.has_edge(*previous, nb.index)) {
        w /= cfg.q;
      }
    }
    out.emplace_back(nb.index, w);
    total += w;
  }
  for (auto& [idx, w] : out) w /= total;
  return out;
}

std::vector<std::vector<std::size_t>> node2vec_walks(const CharacterGraph& g, const WalkConfig& cfg) {
  validate(cfg);
  std::vector<std::vector<std::size_t>> walks;
  walks.reserve(g.node_count() * cfg.walks_per_node);
  for (std::size_t round = 0; round < cfg.walks_per_node; ++round) {
    for (std::size_t start = 0; start < g.node_count(); ++start) {
      Rng rng(derive_seed(cfg.seed, {start, round}));
      std::vector<std::size_t> walk{start};
      while (walk.size() < cfg.walk_length) {
        const std::size_t cur = walk.back();
        if (g.neighbors(cur).empty()) break;
        std::optional<std::size_t> prev;
        if (walk.size() >= 2) prev = walk[walk.size() - 2];
        const auto probs = transition_probabilities(g, prev, cur, cfg);
        const double u = rng.uniform();
        double acc = 0.0;
        std::size_t next = probs.back().first;
        for (const auto& [idx, p] : probs) {
          acc += p;
          if (u < acc) {
            next = idx;
            break;
          }
        }
        walk.push_back(next);
      }
      walks.push_back(std::move(walk));
    }
  }
  return walks;
}

SkipgramResult node2vec(const CharacterGraph& g, const Node2VecConfig& config) {
  const auto walks = node2vec_walks(g, config.walk);
  std::vector<std::vector<std::string>> sequences;
  sequences.reserve(walks.size());
  for (const auto& w : walks) {
    std::vector<std::string> seq;
    for (auto v : w) seq.push_back(g.node(v));
    sequences.push_back(std::move(seq));
  }
  SkipgramConfig sg;
  sg.dim = config.dim;
  sg.window = config.window;
  sg.negative_samples = config.negative_samples;
  sg.epochs = config.epochs;
  sg.learning_rate = config.learning_rate;
  sg.min_count = 1;
  sg.seed = derive_seed(config.walk.seed, {0x736b6970});
  SkipgramResult r = skipgram_train(sequences, sg);

  // Reorder rows to follow the graph's node order.
  std::unordered_map<std::string, Eigen::Index> row;
  for (std::size_t i = 0; i < r.embedding.entity_ids.size(); ++i)
    row[r.embedding.entity_ids[i]] = static_cast<Eigen::Index>(i);
  Matrix ordered = Matrix::Zero(static_cast<Eigen::Index>(g.node_count()), static_cast<Eigen::Index>(config.dim));
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    auto it = row.find(g.node(i));
    if (it != row.end()) ordered.row(static_cast<Eigen::Index>(i)) = r.embedding.vectors.row(it->second);
  }
  r.embedding.entity_ids = g.nodes();
  r.embedding.vectors = std::move(ordered);
  r.embedding.provenance = Provenance::node2vec;
  r.embedding.config["p"] = config.walk.p;
  r.embedding.config["q"] = config.walk.q;
  r.embedding.config["walks_per_node"] = config.walk.walks_per_node;
  r.embedding.config["walk_length"] = config.walk.walk_length;
  r.embedding.config["weighted"] = config.walk.weighted;
  r.embedding.config["seed"] = config.walk.seed;
  return r;
}

Matrix normalized_laplacian(const CharacterGraph& g, bool weighted) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  std::vector<double> deg(g.node_count(), 0.0);
  for (std::size_t i = 0; i < g.node_count(); ++i)
    for (const auto& nb : g.neighbors(i)) deg[i] += weighted ? static_cast<double>(nb.weight) : 1.0;
  Matrix L = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (deg[i] > 0) L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
    for (const auto& nb : g.neighbors(i)) {
      const double w = weighted ? static_cast<double>(nb.weight) : 1.0;
      L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(nb.index)) = -w / std::sqrt(deg[i] * deg[nb.index]);
    }
  }
  return L;
}

LaplacianEigenmapResult laplacian_eigenmap(const CharacterGraph& g, std::size_t dim, bool weighted) {
  if (g.node_count() == 0) throw DomainError("Laplacian eigenmap of an empty graph");
  if (dim < 1) throw DomainError("Laplacian eigenmap dim must be >= 1");
  LaplacianEigenmapResult result;
  const auto comps = connected_components(g);
  result.zero_multiplicity = comps.size();
  result.largest_component_only = comps.size() > 1;
  const CharacterGraph sub = result.largest_component_only ? induced_subgraph(g, comps.front()) : g;
  if (dim >= sub.node_count())
    throw DomainError("Laplacian eigenmap dim " + std::to_string(dim) + " must be smaller than the node count " +
                      std::to_string(sub.node_count()));

  const Eigen::MatrixXd L = normalized_laplacian(sub, weighted);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(L);
  if (solver.info() != Eigen::Success) throw DomainError("symmetric eigensolver did not converge");
  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();

  const auto n = static_cast<Eigen::Index>(sub.node_count());
  Matrix emb(n, static_cast<Eigen::Index>(dim));
  for (std::size_t k = 0; k < dim; ++k) {
    const auto col = static_cast<Eigen::Index>(k + 1);  // skip the null-space vector
    Eigen::VectorXd v = vectors.col(col);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(v(i)) > 1e-10) {
        if (v(i) < 0) v = -v;
        break;
      }
    }
    emb.col(static_cast<Eigen::Index>(k)) = v;
    result.eigenvalues.push_back(values(col));
  }
  result.embedding.entity_ids = sub.nodes();
  result.embedding.vectors = std::move(emb);
  result.embedding.provenance = Provenance::laplacian_eigenmap;
  result.embedding.config = {{"dim", dim}, {"weighted", weighted}, {"largest_component_only", result.largest_component_only}};
  return result;
}

std::vector<Point> project_2d(const EmbeddingMatrix& e) {
  validate(e);
  if (e.size() < 2) throw DomainError("2-D projection needs at least 2 entities");
  if (e.dim() < 2) throw DomainError("2-D projection needs dimension >= 2");
  Eigen::MatrixXd X = e.vectors;
  X.rowwise() -= X.colwise().mean();
  const Eigen::MatrixXd cov = X.transpose() * X;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  const Eigen::Index d = cov.rows();
  Eigen::MatrixXd basis(d, 2);
  for (int k = 0; k < 2; ++k) {
    Eigen::VectorXd v = solver.eigenvectors().col(d - 1 - k);
    for (Eigen::Index i = 0; i < d; ++i) {
      if (std::abs(v(i)) > 1e-10) {
        if (v(i) < 0) v = -v;
        break;
      }
    }
    basis.col(k) = v;
  }
  const Eigen::MatrixXd proj = X * basis;
  std::vector<Point> out(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) out[i] = {proj(static_cast<Eigen::Index>(i), 0), proj(static_cast<Eigen::Index>(i), 1)};
  return out;
}

std::string embedding_to_csv(const EmbeddingMatrix& e) {
  std::vector<std::string> header = {"entity_id"};
  for (std::size_t k = 0; k < e.dim(); ++k) header.push_back("v_" + std::to_string(k + 1));
  std::string out = csv::join(header) + "\n";
  for (std::size_t i = 0; i < e.size(); ++i) {
    std::vector<std::string> row = {e.entity_ids[i]};
    for (std::size_t k = 0; k < e.dim(); ++k)
      row.push_back(csv::format_double(e.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k))));
    out += csv::join(row) + "\n";
  }
  return out;
}

EmbeddingMatrix embedding_from_csv(std::string_view text, Provenance provenance) {
  const auto rows = csv::parse(text);
  if (rows.size() < 2) throw InputError("embedding CSV has no rows");
  const std::size_t d = rows[0].size() - 1;
  if (d == 0) throw InputError("embedding CSV has no vector columns");
  EmbeddingMatrix e;
  e.provenance = provenance;
  e.vectors.resize(static_cast<Eigen::Index>(rows.size() - 1), static_cast<Eigen::Index>(d));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != d + 1) throw InputError("embedding CSV row " + std::to_string(r + 1) + " has the wrong width");
    e.entity_ids.push_back(rows[r][0]);
    for (std::size_t k = 0; k < d; ++k) {
      try {
        e.vectors(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(k)) = std::stod(rows[r][k + 1]);
      } catch (const std::exception&) {
        throw InputError("embedding CSV row " + std::to_string(r + 1) + " has a non-numeric value");
      }
    }
  }
  validate(e);
  return e;
}

nlohmann::json embedding_sidecar(const EmbeddingMatrix& e) {
  return {{"provenance", to_string(e.provenance)}, {"dim", e.dim()}, {"rows", e.size()}, {"config", e.config}};
}

}  // namespace charnet
