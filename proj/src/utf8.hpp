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

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace charnet::utf8 {

struct CodePoint {
  char32_t cp;
  std::size_t byte;
  std::size_t len;
};

// Length of the well-formed sequence at text[i], or 0 if malformed
// (overlong forms, surrogates and values above U+10FFFF are rejected).
inline std::size_t sequence_length(std::string_view text, std::size_t i, char32_t* out) {
  const auto b = [&](std::size_t k) { return static_cast<unsigned char>(text[k]); };
  const unsigned char c = b(i);
  if (c < 0x80) {
    *out = c;
    return 1;
  }
  std::size_t len;
  char32_t cp;
  if (c >= 0xC2 && c <= 0xDF) {
    len = 2;
    cp = c & 0x1F;
  } else if (c >= 0xE0 && c <= 0xEF) {
    len = 3;
    cp = c & 0x0F;
  } else if (c >= 0xF0 && c <= 0xF4) {
    len = 4;
    cp = c & 0x07;
  } else {
    return 0;
  }
  if (i + len > text.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    if ((b(i + k) & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b(i + k) & 0x3F);
  }
  if ((len == 3 && cp < 0x800) || (len == 4 && (cp < 0x10000 || cp > 0x10FFFF)) ||
      (cp >= 0xD800 && cp <= 0xDFFF)) {
    return 0;
  }
  *out = cp;
  return len;
}

inline std::optional<std::size_t> first_invalid(std::string_view text) {
  std::size_t i = 0;
  char32_t cp;
  while (i < text.size()) {
    std::size_t len = sequence_length(text, i, &cp);
    if (len == 0) return i;
    i += len;
  }
  return std::nullopt;
}

// Decodes valid UTF-8; callers validate first.
inline std::vector<CodePoint> decode(std::string_view text) {
  std::vector<CodePoint> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    char32_t cp = 0xFFFD;
    std::size_t len = sequence_length(text, i, &cp);
    if (len == 0) len = 1;
    out.push_back({cp, i, len});
    i += len;
  }
  return out;
}

inline std::size_t length(std::string_view text) { return decode(text).size(); }

}  // namespace charnet::utf8
