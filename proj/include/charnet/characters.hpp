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

// Named-reference resolution through a manually curated alias table, mention
// statistics, and narrative-chart matrices.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "charnet/common.hpp"
#include "charnet/corpus.hpp"

namespace charnet {

struct AliasEntry {
  std::vector<std::string> tokens;
  std::string canonical_id;
};

class AliasTable {
 public:
  /// Sorted by alias token sequence.
  const std::vector<AliasEntry>& entries() const { return entries_; }
  const std::set<std::string>& canonical_ids() const { return canonical_ids_; }
  const TokenizerConfig& tokenizer() const { return tokenizer_; }
  std::size_t max_alias_length() const { return max_len_; }

  /// Canonical id for an exact token sequence, if registered.
  const std::string* lookup(const std::vector<std::string>& tokens) const;

 private:
  friend AliasTable compile_alias_table(const std::vector<std::pair<std::string, std::string>>&,
                                        const TokenizerConfig&);
  std::vector<AliasEntry> entries_;
  std::map<std::vector<std::string>, std::string> index_;
  std::set<std::string> canonical_ids_;
  TokenizerConfig tokenizer_;
  std::size_t max_len_ = 0;
};

/// Tokenizes aliases with the corpus tokenizer and registers each canonical
/// name as an alias of itself. Conflicting targets for one alias throw
/// InputError naming both.
AliasTable compile_alias_table(const std::vector<std::pair<std::string, std::string>>& raw,
                               const TokenizerConfig& tokenizer = {});

/// Hyphenated aliases ("Uruk-Hai") that the corpus tokenizer must keep whole.
std::set<std::string> alias_keep_together(
    const std::vector<std::pair<std::string, std::string>>& raw);

/// Two-column TSV (alias, canonical) or a JSON object/array, by extension.
std::vector<std::pair<std::string, std::string>> read_alias_file(const std::filesystem::path& path);

struct MentionRecord {
  std::string canonical_id;
  Range tokens;
  std::size_t sentence_index = 0;
  std::size_t chapter_index = 0;
  bool in_dialogue = false;
  friend bool operator==(const MentionRecord&, const MentionRecord&) = default;
};

/// Longest-match-first, left-to-right scan within each sentence. Matches never
/// overlap and never cross sentence boundaries. Sorted by token position.
std::vector<MentionRecord> extract_mentions(const TokenizedCorpus& corpus, const AliasTable& aliases);

struct WorkMentionStats {
  std::size_t token_count = 0;
  std::size_t explicit_named_mentions = 0;
  std::size_t pronoun_token_count = 0;
  std::optional<std::size_t> nominal_mention_count;
  std::size_t cooccurrence_count = 0;
};

/// Keyed by work_id.
using MentionStats = std::map<std::string, WorkMentionStats>;

/// Closed-class English personal pronouns (lower case).
const std::set<std::string>& default_pronoun_lexicon();

MentionStats count_mention_types(const TokenizedCorpus& corpus, const AliasTable& aliases,
                                 const std::set<std::string>& pronoun_lexicon = default_pronoun_lexicon(),
                                 const std::optional<std::vector<std::vector<std::string>>>& nominal_lexicon = std::nullopt);

/// Mention counts per (character, work), the input to label derivation.
std::map<std::string, std::map<std::string, std::size_t>> mention_counts_by_work(
    const TokenizedCorpus& corpus, const std::vector<MentionRecord>& mentions);

struct NarrativeChart {
  std::vector<std::string> characters;
  std::vector<std::string> chapter_labels;
  /// Global chapter indices of the columns.
  std::vector<std::size_t> chapter_indices;
  /// rows = characters, cols = chapters.
  Matrix values;
};

/// cell(c, ch) = non-dialogue mentions of c in ch divided by the non-dialogue
/// mentions of all key characters in ch. When work_id is set only that work's
/// chapters become columns.
NarrativeChart narrative_chart(const std::vector<MentionRecord>& mentions,
                               const std::vector<std::string>& key_characters,
                               const TokenizedCorpus& corpus, const AliasTable& aliases,
                               const std::optional<std::string>& work_id = std::nullopt);

std::string mentions_to_csv(const TokenizedCorpus& corpus, const std::vector<MentionRecord>& mentions);
/// Inverse of mentions_to_csv; indices are checked against `corpus`.
std::vector<MentionRecord> mentions_from_csv(std::string_view text, const TokenizedCorpus& corpus);
std::string narrative_chart_to_csv(const NarrativeChart& chart);

}  // namespace charnet
