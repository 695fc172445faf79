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

// Text ingestion: UTF-8 validation, tokenization, sentence and chapter
// segmentation, and quote-based dialogue detection.

#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "charnet/common.hpp"

namespace charnet {

struct RawDocument {
  std::string work_id;
  std::string title;
  std::string text;
  /// ECMAScript regex matched against each line; an empty pattern falls back
  /// to SegmentationConfig::chapter_delimiter.
  std::string chapter_delimiter;
};

struct TokenizerConfig {
  /// Surface forms containing hyphens (or other joiners) that stay one token,
  /// e.g. "Uruk-Hai". Usually filled from the alias table.
  std::set<std::string> keep_together;
};

struct SegmentationConfig {
  TokenizerConfig tokenizer;
  std::string chapter_delimiter = R"(^\s*(Chapter|CHAPTER)\b)";
  /// Tokens that never end a sentence when followed by ".".
  std::set<std::string> abbreviations = {"Mr",  "Mrs", "Ms",  "Dr",  "St",  "Mt",
                                         "Jr",  "Sr",  "Prof", "Capt", "Col", "Gen",
                                         "Lt",  "Sgt", "Rev", "vs",  "etc", "cf",
                                         "e.g", "i.e", "No"};
  /// Quote code points delimiting dialogue. Straight quotes toggle; the
  /// typographic pair opens with U+201C and closes with U+201D.
  std::set<std::string> quote_chars = {"\"", "“", "”"};
};

struct Token {
  std::string surface;
  /// Offset of the first code point of the token, counted in Unicode code
  /// points from the start of its work's text.
  std::size_t char_offset = 0;
  std::size_t work_index = 0;
  friend bool operator==(const Token&, const Token&) = default;
};

struct Chapter {
  std::string work_id;
  Range tokens;
  std::string label;
  friend bool operator==(const Chapter&, const Chapter&) = default;
};

/// Immutable once built; safe for concurrent readers.
struct TokenizedCorpus {
  std::vector<std::string> works;
  std::vector<std::string> titles;
  std::vector<Token> tokens;
  std::vector<Range> sentences;
  std::vector<Chapter> chapters;
  std::vector<Range> dialogue_spans;

  /// Tokens of one work as a contiguous range.
  Range work_tokens(std::size_t work_index) const;
  std::size_t work_index(std::string_view work_id) const;
  /// Maps every token to its sentence index.
  std::vector<std::size_t> sentence_of_token() const;
  /// Maps every sentence to its chapter index.
  std::vector<std::size_t> chapter_of_sentence() const;

  friend bool operator==(const TokenizedCorpus&, const TokenizedCorpus&) = default;
};

/// Throws InputError naming the byte offset of the first invalid sequence.
void validate_utf8(std::string_view text, std::string_view what = "text");

/// Splits text into word and punctuation tokens, returning each token with
/// its code-point offset. Words keep internal apostrophes; a trailing
/// possessive "'s" is split off; hyphenated words split unless listed in
/// keep_together; runs of "." and "…" stay one token.
std::vector<Token> tokenize(std::string_view text, const TokenizerConfig& config = {});

/// Convenience: surfaces only.
std::vector<std::string> tokenize_words(std::string_view text, const TokenizerConfig& config = {});

TokenizedCorpus load_corpus(const std::vector<RawDocument>& documents,
                            const SegmentationConfig& config = {});

/// Dialogue spans delimited by balanced quotes. The span excludes the quote
/// tokens themselves; an unclosed quote closes at the chapter end.
std::vector<Range> detect_dialogue_spans(const TokenizedCorpus& corpus,
                                         const std::set<std::string>& quote_chars);

/// Reads a JSON manifest: {"works": [{"work_id", "title", "path",
/// "chapter_delimiter"}]}. Paths are relative to the manifest's directory.
std::vector<RawDocument> read_manifest(const std::filesystem::path& manifest);

nlohmann::json corpus_to_json(const TokenizedCorpus& corpus);
TokenizedCorpus corpus_from_json(const nlohmann::json& j);

}  // namespace charnet
