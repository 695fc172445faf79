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

#include "charnet/characters.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "charnet/cooccur.hpp"
#include "charnet/csv.hpp"

namespace charnet {

namespace {

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::string ascii_lower(std::string s) {
  for (char& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return s;
}

std::size_t work_of(const TokenizedCorpus& corpus, const MentionRecord& m) {
  return corpus.tokens[m.tokens.begin].work_index;
}

}  // namespace

const std::string* AliasTable::lookup(const std::vector<std::string>& tokens) const {
  auto it = index_.find(tokens);
  return it == index_.end() ? nullptr : &it->second;
}

std::set<std::string> alias_keep_together(
    const std::vector<std::pair<std::string, std::string>>& raw) {
  std::set<std::string> out;
  auto scan = [&](const std::string& s) {
    std::istringstream in(s);
    std::string word;
    while (in >> word) {
      if (word.find('-') == std::string::npos) continue;
      while (!word.empty() && (word.back() == '.' || word.back() == ',')) word.pop_back();
      out.insert(word);
    }
  };
  for (const auto& [alias, canonical] : raw) {
    scan(alias);
    scan(canonical);
  }
  return out;
}

AliasTable compile_alias_table(const std::vector<std::pair<std::string, std::string>>& raw,
                               const TokenizerConfig& tokenizer) {
  if (raw.empty()) throw InputError("alias table has no entries");
  AliasTable table;
  table.tokenizer_ = tokenizer;
  for (const auto& w : alias_keep_together(raw)) table.tokenizer_.keep_together.insert(w);

  auto add = [&](const std::string& alias, const std::string& canonical) {
    std::vector<std::string> tokens = tokenize_words(alias, table.tokenizer_);
    if (tokens.empty()) throw InputError("alias '" + alias + "' has no tokens");
    auto [it, inserted] = table.index_.emplace(tokens, canonical);
    if (!inserted && it->second != canonical) {
      throw InputError("alias '" + join_tokens(tokens) + "' maps to both '" + it->second +
                       "' and '" + canonical + "'");
    }
  };

  for (const auto& [alias, canonical] : raw) {
    if (canonical.empty()) throw InputError("alias '" + alias + "' has an empty canonical id");
    add(alias, canonical);
    table.canonical_ids_.insert(canonical);
  }
  for (const auto& canonical : table.canonical_ids_) add(canonical, canonical);

  for (const auto& [tokens, canonical] : table.index_) {
    table.entries_.push_back({tokens, canonical});
    table.max_len_ = std::max(table.max_len_, tokens.size());
  }
  return table;
}

std::vector<std::pair<std::string, std::string>> read_alias_file(const std::filesystem::path& path) {
  const std::string text = csv::read_file(path);
  std::vector<std::pair<std::string, std::string>> out;
  if (path.extension() == ".json") {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw InputError("malformed alias file " + path.string() + ": " + e.what());
    }
    if (j.is_object()) {
      for (auto it = j.begin(); it != j.end(); ++it) out.emplace_back(it.key(), it.value().get<std::string>());
    } else if (j.is_array()) {
      for (const auto& e : j) out.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    } else {
      throw InputError("alias file " + path.string() + " must hold an object or array");
    }
    return out;
  }
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": expected alias<TAB>canonical");
    out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return out;
}

std::vector<MentionRecord> extract_mentions(const TokenizedCorpus& corpus, const AliasTable& aliases) {
  std::vector<bool> dialogue(corpus.tokens.size(), false);
  for (const Range& r : corpus.dialogue_spans)
    for (std::size_t t = r.begin; t < r.end; ++t) dialogue[t] = true;
  const std::vector<std::size_t> chapter_of = corpus.chapter_of_sentence();

  std::vector<MentionRecord> out;
  std::vector<std::string> window;
  for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
    const Range sent = corpus.sentences[s];
    std::size_t i = sent.begin;
    while (i < sent.end) {
      const std::size_t longest = std::min(aliases.max_alias_length(), sent.end - i);
      bool matched = false;
      for (std::size_t len = longest; len >= 1; --len) {
        window.clear();
        for (std::size_t k = i; k < i + len; ++k) window.push_back(corpus.tokens[k].surface);
        if (const std::string* id = aliases.lookup(window)) {
          out.push_back({*id, {i, i + len}, s, chapter_of[s], dialogue[i]});
          i += len;
          matched = true;
          break;
        }
      }
      if (!matched) ++i;
    }
  }
  return out;
}

const std::set<std::string>& default_pronoun_lexicon() {
  static const std::set<std::string> lexicon = {
      "i",      "me",       "my",    "mine",   "myself", "you",       "your",       "yours",
      "yourself", "yourselves", "he", "him",    "his",    "himself",   "she",        "her",
      "hers",   "herself",  "we",    "us",     "our",    "ours",      "ourselves",  "they",
      "them",   "their",    "theirs", "themselves", "thee", "thou",   "thy",        "thine"};
  return lexicon;
}

MentionStats count_mention_types(const TokenizedCorpus& corpus, const AliasTable& aliases,
                                 const std::set<std::string>& pronoun_lexicon,
                                 const std::optional<std::vector<std::vector<std::string>>>& nominal_lexicon) {
  if (pronoun_lexicon.empty()) throw InputError("pronoun lexicon is empty");
  std::set<std::string> pronouns;
  for (const auto& p : pronoun_lexicon) pronouns.insert(ascii_lower(p));

  const std::vector<MentionRecord> mentions = extract_mentions(corpus, aliases);
  MentionStats stats;
  for (std::size_t w = 0; w < corpus.works.size(); ++w) {
    WorkMentionStats& ws = stats[corpus.works[w]];
    const Range r = corpus.work_tokens(w);
    ws.token_count = r.size();
    for (std::size_t t = r.begin; t < r.end; ++t)
      ws.pronoun_token_count += pronouns.count(ascii_lower(corpus.tokens[t].surface));
    if (nominal_lexicon) ws.nominal_mention_count = 0;
  }

  std::vector<std::vector<MentionRecord>> per_work(corpus.works.size());
  for (const auto& m : mentions) {
    ++stats[corpus.works[work_of(corpus, m)]].explicit_named_mentions;
    per_work[work_of(corpus, m)].push_back(m);
  }
  for (std::size_t w = 0; w < corpus.works.size(); ++w) {
    stats[corpus.works[w]].cooccurrence_count =
        static_cast<std::size_t>(sentence_cooccurrences(per_work[w], corpus).total_weight());
  }

  if (nominal_lexicon) {
    std::map<std::vector<std::string>, bool> phrases;
    std::size_t longest = 0;
    for (const auto& phrase : *nominal_lexicon) {
      if (phrase.empty()) continue;
      std::vector<std::string> lowered;
      for (const auto& t : phrase) lowered.push_back(ascii_lower(t));
      longest = std::max(longest, lowered.size());
      phrases[lowered] = true;
    }
    std::vector<std::string> window;
    for (const Range& sent : corpus.sentences) {
      std::size_t i = sent.begin;
      while (i < sent.end) {
        std::size_t len = std::min(longest, sent.end - i);
        for (; len >= 1; --len) {
          window.clear();
          for (std::size_t k = i; k < i + len; ++k) window.push_back(ascii_lower(corpus.tokens[k].surface));
          if (phrases.count(window)) break;
        }
        if (len >= 1) {
          ++*stats[corpus.works[corpus.tokens[i].work_index]].nominal_mention_count;
          i += len;
        } else {
          ++i;
        }
      }
    }
  }
  return stats;
}

std::map<std::string, std::map<std::string, std::size_t>> mention_counts_by_work(
    const TokenizedCorpus& corpus, const std::vector<MentionRecord>& mentions) {
  std::map<std::string, std::map<std::string, std::size_t>> counts;
  for (const auto& m : mentions) ++counts[m.canonical_id][corpus.works[work_of(corpus, m)]];
  return counts;
}

NarrativeChart narrative_chart(const std::vector<MentionRecord>& mentions,
                               const std::vector<std::string>& key_characters,
                               const TokenizedCorpus& corpus, const AliasTable& aliases,
                               const std::optional<std::string>& work_id) {
  if (key_characters.empty()) throw InputError("narrative chart needs at least one key character");
  std::map<std::string, std::size_t> row_of;
  for (const auto& c : key_characters) {
    if (!aliases.canonical_ids().count(c)) throw InputError("unknown canonical_id '" + c + "'");
    if (!row_of.emplace(c, row_of.size()).second)
      throw InputError("duplicate key character '" + c + "'");
  }
  NarrativeChart chart;
  chart.characters = key_characters;
  std::map<std::size_t, std::size_t> col_of;
  for (std::size_t ch = 0; ch < corpus.chapters.size(); ++ch) {
    if (work_id && corpus.chapters[ch].work_id != *work_id) continue;
    col_of[ch] = chart.chapter_indices.size();
    chart.chapter_indices.push_back(ch);
    chart.chapter_labels.push_back(corpus.chapters[ch].label);
  }
  if (work_id && chart.chapter_indices.empty()) throw InputError("unknown work_id '" + *work_id + "'");

  chart.values = Matrix::Zero(static_cast<Eigen::Index>(key_characters.size()),
                              static_cast<Eigen::Index>(chart.chapter_indices.size()));
  for (const auto& m : mentions) {
    if (m.in_dialogue) continue;
    auto r = row_of.find(m.canonical_id);
    auto c = col_of.find(m.chapter_index);
    if (r == row_of.end() || c == col_of.end()) continue;
    chart.values(static_cast<Eigen::Index>(r->second), static_cast<Eigen::Index>(c->second)) += 1.0;
  }
  for (Eigen::Index c = 0; c < chart.values.cols(); ++c) {
    const double total = chart.values.col(c).sum();
    if (total > 0) chart.values.col(c) /= total;
  }
  return chart;
}

std::string mentions_to_csv(const TokenizedCorpus& corpus, const std::vector<MentionRecord>& mentions) {
  std::string out = "canonical_id,work_id,chapter,sentence,token_start,token_end,in_dialogue\n";
  for (const auto& m : mentions) {
    out += csv::join({m.canonical_id, corpus.works[work_of(corpus, m)], std::to_string(m.chapter_index),
                      std::to_string(m.sentence_index), std::to_string(m.tokens.begin),
                      std::to_string(m.tokens.end), m.in_dialogue ? "true" : "false"});
    out.push_back('\n');
  }
  return out;
}

std::vector<MentionRecord> mentions_from_csv(std::string_view text, const TokenizedCorpus& corpus) {
  const auto rows = csv::parse(text);
  if (rows.empty() || rows[0].size() != 7 || rows[0][0] != "canonical_id")
    throw InputError("mention CSV must start with the canonical_id,work_id,... header");
  std::vector<MentionRecord> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != 7) throw InputError("mention CSV row " + std::to_string(r + 1) + " has the wrong field count");
    MentionRecord m;
    try {
      m.canonical_id = row[0];
      m.chapter_index = std::stoul(row[2]);
      m.sentence_index = std::stoul(row[3]);
      m.tokens = {std::stoul(row[4]), std::stoul(row[5])};
    } catch (const std::exception&) {
      throw InputError("mention CSV row " + std::to_string(r + 1) + " has a malformed index");
    }
    m.in_dialogue = row[6] == "true";
    if (m.tokens.empty() || m.tokens.end > corpus.tokens.size() || m.sentence_index >= corpus.sentences.size() ||
        m.chapter_index >= corpus.chapters.size())
      throw InputError("mention CSV row " + std::to_string(r + 1) + " does not fit the corpus");
    if (corpus.works[work_of(corpus, m)] != row[1])
      throw InputError("mention CSV row " + std::to_string(r + 1) + " names the wrong work");
    out.push_back(std::move(m));
  }
  return out;
}

std::string narrative_chart_to_csv(const NarrativeChart& chart) {
  std::vector<std::string> header = {"character"};
  header.insert(header.end(), chart.chapter_labels.begin(), chart.chapter_labels.end());
  std::string out = csv::join(header) + "\n";
  for (std::size_t r = 0; r < chart.characters.size(); ++r) {
    std::vector<std::string> row = {chart.characters[r]};
    for (Eigen::Index c = 0; c < chart.values.cols(); ++c)
      row.push_back(csv::format_double(chart.values(static_cast<Eigen::Index>(r), c)));
    out += csv::join(row) + "\n";
  }
  return out;
}

}  // namespace charnet
