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

#include "charnet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <regex>
#include <set>

#include "charnet/csv.hpp"
#include "charnet/random.hpp"

namespace charnet {

CharacterGraph::CharacterGraph(std::vector<std::string> nodes, const std::vector<WeightedEdge>& edges) {
  const bool auto_nodes = nodes.empty();
  std::set<std::string> node_set(nodes.begin(), nodes.end());
  if (node_set.size() != nodes.size()) throw InputError("duplicate node id in node list");
  for (const auto& e : edges) {
    if (e.u == e.v) throw InputError("self-loop on '" + e.u + "'");
    if (e.weight < 1) throw InputError("edge (" + e.u + ", " + e.v + ") has weight < 1");
    if (auto_nodes) {
      node_set.insert(e.u);
      node_set.insert(e.v);
    } else if (!node_set.count(e.u) || !node_set.count(e.v)) {
      throw InputError("edge (" + e.u + ", " + e.v + ") references an unknown node");
    }
  }
  nodes_.assign(node_set.begin(), node_set.end());
  adjacency_.resize(nodes_.size());
  for (const auto& e : edges) {
    const std::size_t a = index_of(e.u);
    const std::size_t b = index_of(e.v);
    if (weight(a, b) > 0) throw InputError("pair (" + e.u + ", " + e.v + ") listed twice");
    adjacency_[a].push_back({b, e.weight});
    adjacency_[b].push_back({a, e.weight});
    std::sort(adjacency_[a].begin(), adjacency_[a].end(), [](auto& x, auto& y) { return x.index < y.index; });
    std::sort(adjacency_[b].begin(), adjacency_[b].end(), [](auto& x, auto& y) { return x.index < y.index; });
    ++edge_count_;
  }
}

std::optional<std::size_t> CharacterGraph::find(std::string_view id) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id);
  if (it == nodes_.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - nodes_.begin());
}

std::size_t CharacterGraph::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw DomainError("unknown node '" + std::string(id) + "'");
}

std::int64_t CharacterGraph::weight(std::size_t i, std::size_t j) const {
  const auto& adj = adjacency_[i];
  auto it = std::lower_bound(adj.begin(), adj.end(), j, [](const Neighbor& n, std::size_t v) { return n.index < v; });
  return it != adj.end() && it->index == j ? it->weight : 0;
}

std::vector<WeightedEdge> CharacterGraph::edges() const {
  std::vector<WeightedEdge> out;
  out.reserve(edge_count_);
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    for (const auto& nb : adjacency_[i])
      if (nb.index > i) out.push_back({nodes_[i], nodes_[nb.index], nb.weight});
  return out;
}

void CharacterGraph::set_attribute(const std::string& node, const std::string& key, const std::string& value) {
  index_of(node);
  attributes_[node][key] = value;
}

CharacterGraph build_graph(const EdgeList& edges) { return CharacterGraph({}, edges.entries); }

CharacterGraph merge_graphs(const std::vector<CharacterGraph>& graphs) {
  std::set<std::string> nodes;
  std::map<std::pair<std::string, std::string>, std::int64_t> weights;
  for (const auto& g : graphs) {
    nodes.insert(g.nodes().begin(), g.nodes().end());
    for (const auto& e : g.edges()) weights[{e.u, e.v}] += e.weight;
  }
  std::vector<WeightedEdge> edges;
  for (const auto& [k, w] : weights) edges.push_back({k.first, k.second, w});
  CharacterGraph out({nodes.begin(), nodes.end()}, edges);
  for (auto it = graphs.rbegin(); it != graphs.rend(); ++it)
    for (const auto& [node, attrs] : it->attributes())
      for (const auto& [k, v] : attrs) out.set_attribute(node, k, v);
  return out;
}

CharacterGraph induced_subgraph(const CharacterGraph& g, const std::vector<std::size_t>& keep) {
  std::vector<bool> in(g.node_count(), false);
  std::vector<std::string> nodes;
  for (auto i : keep) {
    in.at(i) = true;
    nodes.push_back(g.node(i));
  }
  std::vector<WeightedEdge> edges;
  for (auto i : keep)
    for (const auto& nb : g.neighbors(i))
      if (nb.index > i && in[nb.index]) edges.push_back({g.node(i), g.node(nb.index), nb.weight});
  CharacterGraph out(nodes, edges);
  for (const auto& [node, attrs] : g.attributes())
    if (out.find(node))
      for (const auto& [k, v] : attrs) out.set_attribute(node, k, v);
  return out;
}

double density_from_counts(std::size_t n, std::size_t m) {
  if (n < 2) throw DomainError("density is undefined for fewer than 2 nodes");
  return static_cast<double>(m) / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double mean_degree_from_counts(std::size_t n, std::size_t m) {
  if (n == 0) throw DomainError("mean degree is undefined for an empty graph");
  return 2.0 * static_cast<double>(m) / static_cast<double>(n);
}

double density(const CharacterGraph& g) { return density_from_counts(g.node_count(), g.edge_count()); }

double undirected_density(const CharacterGraph& g) { return 2.0 * density(g); }

std::size_t degree(const CharacterGraph& g, std::string_view node) { return g.neighbors(g.index_of(node)).size(); }

double mean_degree(const CharacterGraph& g) { return mean_degree_from_counts(g.node_count(), g.edge_count()); }

std::vector<std::int64_t> bfs_distances(const CharacterGraph& g, std::size_t source) {
  std::vector<std::int64_t> dist(g.node_count(), -1);
  std::deque<std::size_t> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (const auto& nb : g.neighbors(v)) {
      if (dist[nb.index] < 0) {
        dist[nb.index] = dist[v] + 1;
        queue.push_back(nb.index);
      }
    }
  }
  return dist;
}

std::vector<std::vector<std::size_t>> connected_components(const CharacterGraph& g) {
  std::vector<std::vector<std::size_t>> comps;
  std::vector<bool> seen(g.node_count(), false);
  for (std::size_t s = 0; s < g.node_count(); ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> comp;
    for (std::size_t v = 0; const auto d : bfs_distances(g, s)) {
      if (d >= 0) {
        comp.push_back(v);
        seen[v] = true;
      }
      ++v;
    }
    comps.push_back(std::move(comp));
  }
  // Components were discovered in order of their smallest member.
  std::stable_sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
  return comps;
}

CharacterGraph largest_component(const CharacterGraph& g) {
  if (g.node_count() == 0) throw DomainError("largest component of an empty graph");
  return induced_subgraph(g, connected_components(g).front());
}

ShortestPathStats shortest_path_stats(const CharacterGraph& g) {
  if (g.node_count() == 0) throw DomainError("shortest paths of an empty graph");
  const auto comps = connected_components(g);
  ShortestPathStats stats;
  stats.largest_component_only = comps.size() > 1;
  const CharacterGraph sub = stats.largest_component_only ? induced_subgraph(g, comps.front()) : g;
  stats.component_size = sub.node_count();
  std::uint64_t total = 0;
  std::uint64_t pairs = 0;
  for (std::size_t s = 0; s < sub.node_count(); ++s) {
    const auto dist = bfs_distances(sub, s);
    for (std::size_t t = s + 1; t < sub.node_count(); ++t) {
      if (dist[t] < 0) continue;
      total += static_cast<std::uint64_t>(dist[t]);
      ++pairs;
      stats.diameter = std::max(stats.diameter, static_cast<std::size_t>(dist[t]));
    }
  }
  stats.avg_shortest_path = pairs ? static_cast<double>(total) / static_cast<double>(pairs) : 0.0;
  return stats;
}

Betweenness betweenness(const CharacterGraph& g) {
  const std::size_t n = g.node_count();
  Betweenness out;
  out.raw.assign(n, 0.0);
  std::vector<double> sigma(n), delta(n);
  std::vector<std::int64_t> dist(n);
  std::vector<std::vector<std::size_t>> preds(n);
  std::vector<std::size_t> order;
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(dist.begin(), dist.end(), -1);
    for (auto& p : preds) p.clear();
    order.clear();
    sigma[s] = 1.0;
    dist[s] = 0;
    std::deque<std::size_t> queue{s};
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      order.push_back(v);
      for (const auto& nb : g.neighbors(v)) {
        const std::size_t w = nb.index;
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const std::size_t w = *it;
      for (auto v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) out.raw[w] += delta[w];
    }
  }
  // Every unordered pair was visited from both endpoints.
  for (auto& b : out.raw) b /= 2.0;
  out.normalized.assign(n, 0.0);
  if (n >= 3) {
    const double scale = static_cast<double>(n - 1) * static_cast<double>(n - 2) / 2.0;
    for (std::size_t i = 0; i < n; ++i) out.normalized[i] = out.raw[i] / scale;
  }
  return out;
}

std::vector<std::string> rank_centrality(const CharacterGraph& g, CentralityMeasure measure, std::size_t k) {
  if (k > g.node_count()) throw DomainError("rank size k exceeds node count");
  std::vector<double> value(g.node_count());
  if (measure == CentralityMeasure::degree) {
    for (std::size_t i = 0; i < g.node_count(); ++i) value[i] = static_cast<double>(g.neighbors(i).size());
  } else {
    value = betweenness(g).raw;
  }
  std::vector<std::size_t> idx(g.node_count());
  std::iota(idx.begin(), idx.end(), 0);
  // Node indices follow canonical_id order, so index order breaks ties.
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return value[a] > value[b]; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(g.node(idx[i]));
  return out;
}

Layout layout_fr(const CharacterGraph& g, const LayoutConfig& config) {
  if (config.iterations < 1) throw DomainError("layout needs at least one iteration");
  const std::size_t n = g.node_count();
  Layout layout;
  layout.positions.assign(n, Point{});
  if (n == 0) return layout;
  const double area = config.width * config.height;
  const double k = std::sqrt(area / static_cast<double>(n));
  layout.ideal_length = k;
  if (n == 1) return layout;

  Rng rng(config.seed);
  const double hw = config.width / 2.0;
  const double hh = config.height / 2.0;
  for (auto& p : layout.positions) {
    p.x = rng.uniform(-hw, hw);
    p.y = rng.uniform(-hh, hh);
  }
  const double t0 = config.width / 10.0;
  std::vector<Point> disp(n);
  auto& pos = layout.positions;
  for (std::size_t iter = 0; iter < config.iterations; ++iter) {
    const double temperature =
        t0 * (1.0 - static_cast<double>(iter) / static_cast<double>(config.iterations));
    std::fill(disp.begin(), disp.end(), Point{});
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t u = v + 1; u < n; ++u) {
        double dx = pos[v].x - pos[u].x;
        double dy = pos[v].y - pos[u].y;
        double d = std::hypot(dx, dy);
        if (d < 1e-12) {
          dx = 1e-6;
          dy = 0.0;
          d = 1e-6;
        }
        const double f = k * k / d;
        disp[v].x += dx / d * f;
        disp[v].y += dy / d * f;
        disp[u].x -= dx / d * f;
        disp[u].y -= dy / d * f;
      }
    }
    for (std::size_t v = 0; v < n; ++v) {
      for (const auto& nb : g.neighbors(v)) {
        if (nb.index < v) continue;
        const std::size_t u = nb.index;
        const double dx = pos[v].x - pos[u].x;
        const double dy = pos[v].y - pos[u].y;
        const double d = std::hypot(dx, dy);
        if (d < 1e-12) continue;
        const double f = d * d / k;
        disp[v].x -= dx / d * f;
        disp[v].y -= dy / d * f;
        disp[u].x += dx / d * f;
        disp[u].y += dy / d * f;
      }
    }
    for (std::size_t v = 0; v < n; ++v) {
      const double len = std::hypot(disp[v].x, disp[v].y);
      if (len > 0) {
        const double step = std::min(len, temperature);
        pos[v].x += disp[v].x / len * step;
        pos[v].y += disp[v].y / len * step;
      }
      pos[v].x = std::clamp(pos[v].x, -hw, hw);
      pos[v].y = std::clamp(pos[v].y, -hh, hh);
    }
  }
  return layout;
}

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string xml_unescape(std::string_view s) {
  static const std::pair<std::string_view, char> entities[] = {
      {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&apos;", '\''}};
  std::string out;
  for (std::size_t i = 0; i < s.size();) {
    bool hit = false;
    if (s[i] == '&') {
      for (const auto& [ent, c] : entities) {
        if (s.substr(i, ent.size()) == ent) {
          out.push_back(c);
          i += ent.size();
          hit = true;
          break;
        }
      }
    }
    if (!hit) out.push_back(s[i++]);
  }
  return out;
}

std::map<std::string, std::string> xml_attributes(const std::string& tag) {
  static const std::regex attr_re(R"re(([A-Za-z_][\w:.\-]*)\s*=\s*"([^"]*)")re");
  std::map<std::string, std::string> out;
  for (auto it = std::sregex_iterator(tag.begin(), tag.end(), attr_re); it != std::sregex_iterator(); ++it)
    out[(*it)[1].str()] = xml_unescape((*it)[2].str());
  return out;
}

}  // namespace

std::string to_graphml(const CharacterGraph& g) {
  std::set<std::string> keys;
  for (const auto& [node, attrs] : g.attributes())
    for (const auto& [k, v] : attrs) keys.insert(k);
  std::map<std::string, std::string> key_id;
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n";
  for (const auto& k : keys) {
    key_id[k] = "n_" + std::to_string(key_id.size());
    out += "  <key id=\"" + key_id[k] + "\" for=\"node\" attr.name=\"" + xml_escape(k) +
           "\" attr.type=\"string\"/>\n";
  }
  out += "  <graph id=\"G\" edgedefault=\"undirected\">\n";
  for (const auto& id : g.nodes()) {
    out += "    <node id=\"" + xml_escape(id) + "\"";
    auto it = g.attributes().find(id);
    if (it == g.attributes().end() || it->second.empty()) {
      out += "/>\n";
      continue;
    }
    out += ">";
    for (const auto& [k, v] : it->second) out += "<data key=\"" + key_id[k] + "\">" + xml_escape(v) + "</data>";
    out += "</node>\n";
  }
  for (const auto& e : g.edges()) {
    out += "    <edge source=\"" + xml_escape(e.u) + "\" target=\"" + xml_escape(e.v) +
           "\"><data key=\"weight\">" + std::to_string(e.weight) + "</data></edge>\n";
  }
  out += "  </graph>\n</graphml>\n";
  return out;
}

CharacterGraph from_graphml(std::string_view xml) {
  std::map<std::string, std::string> key_names;  // key id -> attr.name
  std::vector<std::string> nodes;
  std::map<std::string, std::map<std::string, std::string>> attrs;
  std::vector<WeightedEdge> edges;

  enum class Owner { none, node, edge } owner = Owner::none;
  std::string current_node;
  WeightedEdge current_edge;
  std::string data_key;
  std::size_t i = 0;
  while ((i = xml.find('<', i)) != std::string_view::npos) {
    const std::size_t close = xml.find('>', i);
    if (close == std::string_view::npos) throw InputError("GraphML: unterminated tag");
    std::string tag(xml.substr(i + 1, close - i - 1));
    const std::size_t text_start = close + 1;
    i = close + 1;
    if (tag.empty() || tag[0] == '?' || tag[0] == '!') continue;
    const bool closing = tag[0] == '/';
    const bool self_closing = tag.back() == '/';
    std::string name = tag.substr(closing ? 1 : 0);
    name = name.substr(0, name.find_first_of(" \t\r\n/"));
    if (closing) {
      if (name == "node" || name == "edge") {
        if (name == "edge") edges.push_back(current_edge);
        owner = Owner::none;
      }
      continue;
    }
    auto a = xml_attributes(tag);
    if (name == "key") {
      key_names[a["id"]] = a.count("attr.name") ? a["attr.name"] : a["id"];
    } else if (name == "node") {
      if (!a.count("id")) throw InputError("GraphML: node without id");
      current_node = a["id"];
      nodes.push_back(current_node);
      owner = self_closing ? Owner::none : Owner::node;
    } else if (name == "edge") {
      if (!a.count("source") || !a.count("target")) throw InputError("GraphML: edge without endpoints");
      current_edge = {a["source"], a["target"], 1};
      if (self_closing) {
        edges.push_back(current_edge);
        owner = Owner::none;
      } else {
        owner = Owner::edge;
      }
    } else if (name == "data" && !self_closing) {
      const std::size_t end = xml.find("</data>", text_start);
      if (end == std::string_view::npos) throw InputError("GraphML: unterminated data element");
      const std::string value = xml_unescape(xml.substr(text_start, end - text_start));
      const std::string key = key_names.count(a["key"]) ? key_names[a["key"]] : a["key"];
      if (owner == Owner::edge && key == "weight") {
        try {
          current_edge.weight = std::stoll(value);
        } catch (const std::exception&) {
          throw InputError("GraphML: non-integer weight '" + value + "'");
        }
      } else if (owner == Owner::node) {
        attrs[current_node][key] = value;
      }
      i = end + 7;
    }
  }
  std::vector<WeightedEdge> canonical;
  for (auto e : edges) {
    if (e.v < e.u) std::swap(e.u, e.v);
    canonical.push_back(e);
  }
  CharacterGraph g(nodes, canonical);
  for (const auto& [node, kv] : attrs)
    for (const auto& [k, v] : kv) g.set_attribute(node, k, v);
  return g;
}

std::string layout_to_csv(const CharacterGraph& g, const Layout& layout) {
  std::string out = "node,x,y\n";
  for (std::size_t i = 0; i < g.node_count(); ++i)
    out += csv::join({g.node(i), csv::format_double(layout.positions[i].x),
                      csv::format_double(layout.positions[i].y)}) +
           "\n";
  return out;
}

}  // namespace charnet
