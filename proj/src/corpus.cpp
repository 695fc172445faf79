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

#include "charnet/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>
#include <unordered_set>

#include "utf8.hpp"

namespace charnet {

namespace {

using utf8::CodePoint;

bool is_space(char32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' ||
         c == 0x00A0 || (c >= 0x2000 && c <= 0x200B) || c == 0x3000 || c == 0xFEFF;
}

bool is_apostrophe(char32_t c) { return c == '\'' || c == 0x2019; }
bool is_hyphen(char32_t c) { return c == '-' || c == 0x2010 || c == 0x2011; }

bool is_word_char(char32_t c) {
  if (c < 0x80) return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  if (is_space(c)) return false;
  // Latin-1 punctuation and symbols, general punctuation, CJK punctuation.
  if (c >= 0x00A1 && c <= 0x00BF) return false;
  if (c == 0x00D7 || c == 0x00F7) return false;
  if (c >= 0x2010 && c <= 0x206F) return false;
  if (c >= 0x3000 && c <= 0x303F) return false;
  return true;
}

struct RawToken {
  std::string surface;
  std::size_t cp_offset;
  std::size_t byte_offset;
  std::size_t byte_end;
};

// Splits a scanned word into possessive / hyphen parts.
void emit_word(const std::vector<CodePoint>& cps, std::size_t first, std::size_t last,
               std::string_view text, const TokenizerConfig& config,
               std::vector<RawToken>& out) {
  auto slice = [&](std::size_t a, std::size_t b) {
    RawToken t;
    t.byte_offset = cps[a].byte;
    t.byte_end = cps[b - 1].byte + cps[b - 1].len;
    t.cp_offset = a;
    t.surface = std::string(text.substr(t.byte_offset, t.byte_end - t.byte_offset));
    return t;
  };

  std::size_t stem_end = last;
  bool possessive = false;
  if (last - first >= 3 && is_apostrophe(cps[last - 2].cp) &&
      (cps[last - 1].cp == 's' || cps[last - 1].cp == 'S')) {
    stem_end = last - 2;
    possessive = true;
  }

  RawToken stem = slice(first, stem_end);
  bool has_hyphen = false;
  for (std::size_t i = first; i < stem_end; ++i) has_hyphen |= is_hyphen(cps[i].cp);
  if (!has_hyphen || config.keep_together.count(stem.surface)) {
    out.push_back(std::move(stem));
  } else {
    std::size_t start = first;
    for (std::size_t i = first; i < stem_end; ++i) {
      if (is_hyphen(cps[i].cp)) {
        if (i > start) out.push_back(slice(start, i));
        out.push_back(slice(i, i + 1));
        start = i + 1;
      }
    }
    if (start < stem_end) out.push_back(slice(start, stem_end));
  }
  if (possessive) out.push_back(slice(stem_end, last));
}

std::vector<RawToken> tokenize_raw(std::string_view text, const TokenizerConfig& config) {
  const std::vector<CodePoint> cps = utf8::decode(text);
  std::vector<RawToken> out;
  const std::size_t n = cps.size();
  std::size_t i = 0;
  while (i < n) {
    const char32_t c = cps[i].cp;
    if (is_space(c)) {
      ++i;
      continue;
    }
    if (is_word_char(c)) {
      std::size_t j = i + 1;
      while (j < n) {
        if (is_word_char(cps[j].cp)) {
          ++j;
        } else if ((is_apostrophe(cps[j].cp) || is_hyphen(cps[j].cp)) && j + 1 < n &&
                   is_word_char(cps[j + 1].cp)) {
          j += 2;
        } else {
          break;
        }
      }
      emit_word(cps, i, j, text, config, out);
      i = j;
      continue;
    }
    std::size_t j = i + 1;
    if (c == '.') {
      while (j < n && cps[j].cp == '.') ++j;
    }
    RawToken t;
    t.cp_offset = i;
    t.byte_offset = cps[i].byte;
    t.byte_end = cps[j - 1].byte + cps[j - 1].len;
    t.surface = std::string(text.substr(t.byte_offset, t.byte_end - t.byte_offset));
    out.push_back(std::move(t));
    i = j;
  }
  return out;
}

bool is_terminator(std::string_view s) { return s == "." || s == "!" || s == "?"; }

bool is_closer(std::string_view s) {
  return s == "\"" || s == "”" || s == "’" || s == "'" || s == ")" || s == "]" || s == "»";
}

bool starts_lowercase(std::string_view s) {
  if (s.empty()) return false;
  const auto cps = utf8::decode(s);
  const char32_t c = cps.front().cp;
  return (c >= 'a' && c <= 'z') || (c >= 0x00DF && c <= 0x00FF && c != 0x00F7);
}

bool is_single_capital(std::string_view s) { return s.size() == 1 && s[0] >= 'A' && s[0] <= 'Z'; }

std::string collapse_ws(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char ch : s) {
    if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
      pending = !out.empty();
    } else {
      if (pending) out.push_back(' ');
      pending = false;
      out.push_back(ch);
    }
  }
  return out;
}

struct ChapterStart {
  std::size_t byte;
  std::size_t heading_end_byte;
  std::string label;
};

std::vector<ChapterStart> find_chapter_headings(std::string_view text, const std::string& pattern,
                                                const std::string& work_id) {
  std::regex re;
  try {
    re = std::regex(pattern, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw InputError("invalid chapter delimiter pattern for work '" + work_id + "': " + pattern);
  }
  std::vector<ChapterStart> starts;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    std::string line(text.substr(pos, end - pos));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!collapse_ws(line).empty() && std::regex_search(line, re)) {
      starts.push_back({pos, end, collapse_ws(line)});
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return starts;
}

}  // namespace

void validate_utf8(std::string_view text, std::string_view what) {
  if (auto bad = utf8::first_invalid(text)) {
    throw InputError("invalid UTF-8 in " + std::string(what) + " at byte offset " +
                     std::to_string(*bad));
  }
}

std::vector<Token> tokenize(std::string_view text, const TokenizerConfig& config) {
  validate_utf8(text);
  std::vector<Token> out;
  for (auto& t : tokenize_raw(text, config)) out.push_back({std::move(t.surface), t.cp_offset, 0});
  return out;
}

std::vector<std::string> tokenize_words(std::string_view text, const TokenizerConfig& config) {
  std::vector<std::string> out;
  for (auto& t : tokenize(text, config)) out.push_back(std::move(t.surface));
  return out;
}

Range TokenizedCorpus::work_tokens(std::size_t wi) const {
  auto lo = std::partition_point(tokens.begin(), tokens.end(),
                                 [&](const Token& t) { return t.work_index < wi; });
  auto hi = std::partition_point(lo, tokens.end(),
                                 [&](const Token& t) { return t.work_index <= wi; });
  return {static_cast<std::size_t>(lo - tokens.begin()),
          static_cast<std::size_t>(hi - tokens.begin())};
}

std::size_t TokenizedCorpus::work_index(std::string_view work_id) const {
  for (std::size_t i = 0; i < works.size(); ++i)
    if (works[i] == work_id) return i;
  throw InputError("unknown work_id '" + std::string(work_id) + "'");
}

std::vector<std::size_t> TokenizedCorpus::sentence_of_token() const {
  std::vector<std::size_t> out(tokens.size());
  for (std::size_t s = 0; s < sentences.size(); ++s)
    for (std::size_t t = sentences[s].begin; t < sentences[s].end; ++t) out[t] = s;
  return out;
}

std::vector<std::size_t> TokenizedCorpus::chapter_of_sentence() const {
  std::vector<std::size_t> out(sentences.size());
  std::size_t c = 0;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    while (c < chapters.size() && !chapters[c].tokens.contains(sentences[s])) ++c;
    out[s] = c;
  }
  return out;
}

TokenizedCorpus load_corpus(const std::vector<RawDocument>& documents,
                            const SegmentationConfig& config) {
  if (documents.empty()) throw InputError("corpus needs at least one document");
  TokenizedCorpus corpus;
  std::unordered_set<std::string> seen;

  for (std::size_t wi = 0; wi < documents.size(); ++wi) {
    const RawDocument& doc = documents[wi];
    if (doc.work_id.empty()) throw InputError("document " + std::to_string(wi) + " has an empty work_id");
    if (!seen.insert(doc.work_id).second)
      throw InputError("duplicate work_id '" + doc.work_id + "'");
    validate_utf8(doc.text, "work '" + doc.work_id + "'");

    std::vector<RawToken> raw = tokenize_raw(doc.text, config.tokenizer);
    if (raw.empty()) throw InputError("work '" + doc.work_id + "' is empty");

    corpus.works.push_back(doc.work_id);
    corpus.titles.push_back(doc.title);

    const std::string& pattern =
        doc.chapter_delimiter.empty() ? config.chapter_delimiter : doc.chapter_delimiter;
    std::vector<ChapterStart> headings = find_chapter_headings(doc.text, pattern, doc.work_id);

    const std::size_t base = corpus.tokens.size();
    // Chapter boundaries as token indices, plus the token index where each
    // heading line ends (forced sentence break).
    std::vector<std::pair<std::size_t, std::string>> chapter_starts;
    std::vector<std::size_t> forced_breaks;
    {
      std::size_t h = 0;
      std::size_t ti = 0;
      if (headings.empty() || raw.front().byte_offset < headings.front().byte) {
        chapter_starts.emplace_back(0, headings.empty() ? (doc.title.empty() ? doc.work_id : doc.title)
                                                        : std::string("preamble"));
      }
      for (; h < headings.size(); ++h) {
        while (ti < raw.size() && raw[ti].byte_offset < headings[h].byte) ++ti;
        if (ti == raw.size()) break;
        std::size_t next_start = h + 1 < headings.size() ? headings[h + 1].byte : doc.text.size();
        if (raw[ti].byte_offset >= next_start) continue;  // heading without tokens
        if (!chapter_starts.empty() && chapter_starts.back().first == ti) {
          chapter_starts.back().second = headings[h].label;
        } else {
          chapter_starts.emplace_back(ti, headings[h].label);
        }
        std::size_t tj = ti;
        while (tj < raw.size() && raw[tj].byte_offset < headings[h].heading_end_byte) ++tj;
        forced_breaks.push_back(tj);
      }
    }

    for (auto& t : raw) corpus.tokens.push_back({t.surface, t.cp_offset, wi});

    for (std::size_t c = 0; c < chapter_starts.size(); ++c) {
      std::size_t b = chapter_starts[c].first;
      std::size_t e = c + 1 < chapter_starts.size() ? chapter_starts[c + 1].first : raw.size();
      corpus.chapters.push_back({doc.work_id, {base + b, base + e}, chapter_starts[c].second});
    }

    // Sentence segmentation within each chapter of this work.
    std::vector<bool> force(raw.size() + 1, false);
    for (auto fb : forced_breaks) force[fb] = true;
    for (std::size_t i = 1; i < raw.size(); ++i) {
      std::size_t newlines = 0;
      for (std::size_t b = raw[i - 1].byte_end; b < raw[i].byte_offset; ++b)
        newlines += doc.text[b] == '\n';
      if (newlines >= 2) force[i] = true;
    }

    for (std::size_t c = 0; c < chapter_starts.size(); ++c) {
      std::size_t cb = chapter_starts[c].first;
      std::size_t ce = c + 1 < chapter_starts.size() ? chapter_starts[c + 1].first : raw.size();
      std::size_t s = cb;
      std::size_t i = cb;
      while (i < ce) {
        if (i > s && force[i]) {
          corpus.sentences.push_back({base + s, base + i});
          s = i;
        }
        const std::string& surf = raw[i].surface;
        bool term = is_terminator(surf);
        if (term && surf == "." && i > s && raw[i - 1].byte_end == raw[i].byte_offset &&
            (config.abbreviations.count(raw[i - 1].surface) || is_single_capital(raw[i - 1].surface))) {
          term = false;
        }
        if (!term) {
          ++i;
          continue;
        }
        std::size_t j = i + 1;
        while (j < ce && !force[j] &&
               (is_terminator(raw[j].surface) ||
                (is_closer(raw[j].surface) && raw[j].byte_offset == raw[j - 1].byte_end))) {
          ++j;
        }
        if (j < ce && !force[j] && starts_lowercase(raw[j].surface)) {
          i = j;
          continue;
        }
        corpus.sentences.push_back({base + s, base + j});
        s = j;
        i = j;
      }
      if (s < ce) corpus.sentences.push_back({base + s, base + ce});
    }
  }

  corpus.dialogue_spans = detect_dialogue_spans(corpus, config.quote_chars);
  return corpus;
}

std::vector<Range> detect_dialogue_spans(const TokenizedCorpus& corpus,
                                         const std::set<std::string>& quote_chars) {
  static const std::set<std::string> openers = {"“", "«", "„"};
  static const std::set<std::string> closers = {"”", "»"};
  std::vector<Range> spans;
  for (const Chapter& ch : corpus.chapters) {
    bool open = false;
    std::size_t start = 0;
    for (std::size_t t = ch.tokens.begin; t < ch.tokens.end; ++t) {
      const std::string& s = corpus.tokens[t].surface;
      if (!quote_chars.count(s)) continue;
      const bool opener = openers.count(s) > 0;
      const bool closer = closers.count(s) > 0;
      const bool toggle = !opener && !closer;
      if (!open && (opener || toggle)) {
        open = true;
        start = t + 1;
      } else if (open && (closer || toggle)) {
        if (t > start) spans.push_back({start, t});
        open = false;
      }
    }
    if (open && ch.tokens.end > start) spans.push_back({start, ch.tokens.end});
  }
  return spans;
}

std::vector<RawDocument> read_manifest(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw InputError("cannot open manifest " + manifest.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("malformed manifest " + manifest.string() + ": " + e.what());
  }
  if (!j.contains("works") || !j["works"].is_array())
    throw InputError("manifest " + manifest.string() + " lacks a \"works\" array");
  std::vector<RawDocument> docs;
  const auto dir = manifest.parent_path();
  for (const auto& w : j["works"]) {
    RawDocument d;
    d.work_id = w.value("work_id", "");
    d.title = w.value("title", d.work_id);
    d.chapter_delimiter = w.value("chapter_delimiter", "");
    std::filesystem::path p = w.value("path", "");
    if (p.is_relative()) p = dir / p;
    std::ifstream f(p, std::ios::binary);
    if (!f) throw InputError("cannot open text for work '" + d.work_id + "': " + p.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    d.text = ss.str();
    docs.push_back(std::move(d));
  }
  return docs;
}

nlohmann::json corpus_to_json(const TokenizedCorpus& c) {
  using nlohmann::json;
  json works = json::array();
  for (std::size_t i = 0; i < c.works.size(); ++i)
    works.push_back({{"work_id", c.works[i]}, {"title", c.titles[i]}});
  json tokens = json::array();
  for (const auto& t : c.tokens) tokens.push_back(json::array({t.surface, t.char_offset, t.work_index}));
  auto ranges = [](const std::vector<Range>& rs) {
    json a = json::array();
    for (const auto& r : rs) a.push_back(json::array({r.begin, r.end}));
    return a;
  };
  json chapters = json::array();
  for (const auto& ch : c.chapters)
    chapters.push_back({{"work_id", ch.work_id},
                        {"begin", ch.tokens.begin},
                        {"end", ch.tokens.end},
                        {"label", ch.label}});
  return {{"works", works},
          {"tokens", tokens},
          {"sentences", ranges(c.sentences)},
          {"chapters", chapters},
          {"dialogue_spans", ranges(c.dialogue_spans)}};
}

TokenizedCorpus corpus_from_json(const nlohmann::json& j) {
  TokenizedCorpus c;
  try {
    for (const auto& w : j.at("works")) {
      c.works.push_back(w.at("work_id").get<std::string>());
      c.titles.push_back(w.value("title", ""));
    }
    for (const auto& t : j.at("tokens"))
      c.tokens.push_back({t.at(0).get<std::string>(), t.at(1).get<std::size_t>(), t.at(2).get<std::size_t>()});
    for (const auto& r : j.at("sentences")) c.sentences.push_back({r.at(0), r.at(1)});
    for (const auto& ch : j.at("chapters"))
      c.chapters.push_back({ch.at("work_id"), {ch.at("begin"), ch.at("end")}, ch.value("label", "")});
    for (const auto& r : j.at("dialogue_spans")) c.dialogue_spans.push_back({r.at(0), r.at(1)});
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed corpus JSON: ") + e.what());
  }
  return c;
}

}  // namespace charnet
