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

// Weighted undirected character graph and the social-network metrics computed
// on it: density, degree, shortest paths, betweenness, components, and a
// force-directed layout.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "charnet/cooccur.hpp"

namespace charnet {

struct Neighbor {
  std::size_t index;
  std::int64_t weight;
};

/// Nodes are indexed by sorted canonical_id; adjacency lists are sorted by
/// neighbor index. Immutable after construction apart from node attributes.
class CharacterGraph {
 public:
  CharacterGraph() = default;

  /// Builds from explicit nodes (may include isolated ones) and edges. Throws
  /// on self-loops, weights < 1, repeated pairs, or endpoints not in `nodes`
  /// (endpoints are added automatically when `nodes` is empty).
  CharacterGraph(std::vector<std::string> nodes, const std::vector<WeightedEdge>& edges);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::string& node(std::size_t i) const { return nodes_[i]; }
  std::optional<std::size_t> find(std::string_view id) const;
  /// Throws DomainError for an unknown id.
  std::size_t index_of(std::string_view id) const;

  std::span<const Neighbor> neighbors(std::size_t i) const { return adjacency_[i]; }
  /// 0 when not adjacent.
  std::int64_t weight(std::size_t i, std::size_t j) const;
  bool has_edge(std::size_t i, std::size_t j) const { return weight(i, j) > 0; }

  /// Each undirected edge once, u < v, sorted.
  std::vector<WeightedEdge> edges() const;

  const std::map<std::string, std::map<std::string, std::string>>& attributes() const { return attributes_; }
  void set_attribute(const std::string& node, const std::string& key, const std::string& value);

 private:
  std::vector<std::string> nodes_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::size_t edge_count_ = 0;
  std::map<std::string, std::map<std::string, std::string>> attributes_;
};

CharacterGraph build_graph(const EdgeList& edges);

/// Node union with summed edge weights. Attributes of earlier graphs win.
CharacterGraph merge_graphs(const std::vector<CharacterGraph>& graphs);

CharacterGraph induced_subgraph(const CharacterGraph& g, const std::vector<std::size_t>& keep);

/// m / (n (n - 1)) with each undirected edge counted once. Throws for n < 2.
double density(const CharacterGraph& g);
/// 2m / (n (n - 1)), the usual undirected density.
double undirected_density(const CharacterGraph& g);
/// Closed forms used for published (n, m) pairs without a graph.
double density_from_counts(std::size_t n, std::size_t m);
double mean_degree_from_counts(std::size_t n, std::size_t m);

std::size_t degree(const CharacterGraph& g, std::string_view node);
double mean_degree(const CharacterGraph& g);

/// Connected components as sorted index lists, ordered by decreasing size and
/// then by smallest member.
std::vector<std::vector<std::size_t>> connected_components(const CharacterGraph& g);

/// Induced subgraph on the largest component; ties go to the component with
/// the lexicographically smallest member.
CharacterGraph largest_component(const CharacterGraph& g);

struct ShortestPathStats {
  std::size_t diameter = 0;
  double avg_shortest_path = 0.0;
  /// True when the graph was disconnected and the largest component was used.
  bool largest_component_only = false;
  std::size_t component_size = 0;
};

/// Unweighted BFS distances averaged over unordered reachable pairs.
ShortestPathStats shortest_path_stats(const CharacterGraph& g);

/// Unweighted hop distances from one source; unreachable nodes get -1.
std::vector<std::int64_t> bfs_distances(const CharacterGraph& g, std::size_t source);

struct Betweenness {
  /// Indexed like g.nodes(). Each unordered pair counted once.
  std::vector<double> raw;
  /// raw / ((n - 1)(n - 2) / 2); zero when n < 3.
  std::vector<double> normalized;
};

/// Brandes accumulation over BFS shortest-path DAGs.
Betweenness betweenness(const CharacterGraph& g);

enum class CentralityMeasure { degree, betweenness };

/// Top-k ids by descending value; ties broken by ascending canonical_id.
std::vector<std::string> rank_centrality(const CharacterGraph& g, CentralityMeasure measure, std::size_t k);

struct LayoutConfig {
  std::size_t iterations = 500;
  std::uint64_t seed = 0;
  double width = 1.0;
  double height = 1.0;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Layout {
  std::vector<Point> positions;  ///< indexed like g.nodes()
  double ideal_length = 0.0;     ///< k = sqrt(area / n)
};

/// Fruchterman-Reingold: repulsion k^2/d between all pairs, attraction d^2/k
/// along edges, displacement capped by a linearly cooled temperature, and
/// positions clamped to the frame centred on the origin.
Layout layout_fr(const CharacterGraph& g, const LayoutConfig& config);

std::string to_graphml(const CharacterGraph& g);
CharacterGraph from_graphml(std::string_view xml);
std::string layout_to_csv(const CharacterGraph& g, const Layout& layout);

}  // namespace charnet
