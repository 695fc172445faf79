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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "charnet/characters.hpp"
#include "charnet/corpus.hpp"

namespace charnet {

enum class CooccurrenceStrategy { sentence, window };

/// How repeated mentions inside one sentence count towards a pair.
enum class SentenceMultiplicity {
  once,       ///< each sentence adds 1 per distinct pair
  instances,  ///< each sentence adds count(u) * count(v)
};

struct WeightedEdge {
  std::string u;
  std::string v;
  std::int64_t weight = 1;
  friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

/// Undirected weighted pairs with u < v (lexicographic), sorted by (u, v).
struct EdgeList {
  std::vector<WeightedEdge> entries;
  CooccurrenceStrategy strategy = CooccurrenceStrategy::sentence;
  std::size_t window_chars = 0;
  SentenceMultiplicity multiplicity = SentenceMultiplicity::once;

  /// Sum of all weights.
  std::int64_t total_weight() const;
};

EdgeList sentence_cooccurrences(const std::vector<MentionRecord>& mentions,
                                const TokenizedCorpus& corpus,
                                SentenceMultiplicity multiplicity = SentenceMultiplicity::once);

/// Two mention instances co-occur when their code-point offsets differ by at
/// most window_chars and both lie in the same chapter. Each qualifying
/// instance pair of distinct characters adds 1 to that character pair.
EdgeList window_cooccurrences(const std::vector<MentionRecord>& mentions,
                              const TokenizedCorpus& corpus, std::size_t window_chars = 2000);

/// CSV "u,v,weight" with a header row.
std::string edges_to_csv(const EdgeList& edges);
EdgeList edges_from_csv(std::string_view text);

std::string to_string(CooccurrenceStrategy s);
CooccurrenceStrategy strategy_from_string(std::string_view s);

}  // namespace charnet
