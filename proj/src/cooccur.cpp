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

#include "charnet/cooccur.hpp"

#include <algorithm>
#include <map>

#include "charnet/csv.hpp"

namespace charnet {

namespace {

using PairKey = std::pair<std::string, std::string>;

PairKey ordered(const std::string& a, const std::string& b) {
  return a < b ? PairKey{a, b} : PairKey{b, a};
}

std::vector<WeightedEdge> to_entries(const std::map<PairKey, std::int64_t>& weights) {
  std::vector<WeightedEdge> out;
  out.reserve(weights.size());
  for (const auto& [key, w] : weights) out.push_back({key.first, key.second, w});
  return out;
}

}  // namespace

std::int64_t EdgeList::total_weight() const {
  std::int64_t total = 0;
  for (const auto& e : entries) total += e.weight;
  return total;
}

EdgeList sentence_cooccurrences(const std::vector<MentionRecord>& mentions, const TokenizedCorpus& corpus,
                                SentenceMultiplicity multiplicity) {
  std::map<std::size_t, std::map<std::string, std::int64_t>> per_sentence;
  for (const auto& m : mentions) {
    if (m.sentence_index >= corpus.sentences.size())
      throw InputError("mention of '" + m.canonical_id + "' refers to a sentence outside the corpus");
    ++per_sentence[m.sentence_index][m.canonical_id];
  }
  std::map<PairKey, std::int64_t> weights;
  for (const auto& [sentence, counts] : per_sentence) {
    for (auto a = counts.begin(); a != counts.end(); ++a) {
      for (auto b = std::next(a); b != counts.end(); ++b) {
        weights[{a->first, b->first}] +=
            multiplicity == SentenceMultiplicity::once ? 1 : a->second * b->second;
      }
    }
  }
  EdgeList out;
  out.entries = to_entries(weights);
  out.strategy = CooccurrenceStrategy::sentence;
  out.multiplicity = multiplicity;
  return out;
}

EdgeList window_cooccurrences(const std::vector<MentionRecord>& mentions, const TokenizedCorpus& corpus,
                              std::size_t window_chars) {
  if (window_chars == 0) throw DomainError("window_chars must be positive");
  struct Instance {
    std::size_t offset;
    const std::string* id;
  };
  std::map<std::size_t, std::vector<Instance>> per_chapter;
  for (const auto& m : mentions)
    per_chapter[m.chapter_index].push_back({corpus.tokens[m.tokens.begin].char_offset, &m.canonical_id});

  std::map<PairKey, std::int64_t> weights;
  for (auto& [chapter, items] : per_chapter) {
    std::stable_sort(items.begin(), items.end(),
                     [](const Instance& a, const Instance& b) { return a.offset < b.offset; });
    for (std::size_t i = 0; i < items.size(); ++i) {
      for (std::size_t j = i + 1; j < items.size() && items[j].offset - items[i].offset <= window_chars; ++j) {
        if (*items[i].id != *items[j].id) ++weights[ordered(*items[i].id, *items[j].id)];
      }
    }
  }
  EdgeList out;
  out.entries = to_entries(weights);
  out.strategy = CooccurrenceStrategy::window;
  out.window_chars = window_chars;
  return out;
}

std::string edges_to_csv(const EdgeList& edges) {
  std::string out = "u,v,weight\n";
  for (const auto& e : edges.entries) out += csv::join({e.u, e.v, std::to_string(e.weight)}) + "\n";
  return out;
}

EdgeList edges_from_csv(std::string_view text) {
  auto rows = csv::parse(text);
  EdgeList out;
  std::map<PairKey, std::int64_t> weights;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (i == 0 && !r.empty() && r[0] == "u") continue;
    if (r.size() != 3) throw InputError("edge CSV row " + std::to_string(i + 1) + " needs 3 fields");
    std::int64_t w = 0;
    try {
      w = std::stoll(r[2]);
    } catch (const std::exception&) {
      throw InputError("edge CSV row " + std::to_string(i + 1) + " has a non-integer weight");
    }
    if (w < 1) throw InputError("edge CSV row " + std::to_string(i + 1) + " has weight < 1");
    if (r[0] == r[1]) throw InputError("edge CSV row " + std::to_string(i + 1) + " is a self-loop on '" + r[0] + "'");
    if (!weights.emplace(ordered(r[0], r[1]), w).second)
      throw InputError("edge CSV lists pair (" + r[0] + ", " + r[1] + ") twice");
  }
  out.entries = to_entries(weights);
  return out;
}

std::string to_string(CooccurrenceStrategy s) {
  return s == CooccurrenceStrategy::sentence ? "sentence" : "window";
}

CooccurrenceStrategy strategy_from_string(std::string_view s) {
  if (s == "sentence") return CooccurrenceStrategy::sentence;
  if (s == "window") return CooccurrenceStrategy::window;
  throw InputError("unknown co-occurrence strategy '" + std::string(s) + "'");
}

}  // namespace charnet
