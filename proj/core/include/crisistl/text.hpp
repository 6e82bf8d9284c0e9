// Copyright 2026 The crisistl Authors.
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

// Tweet text normalization shared by keyword filtering, entity extraction,
// de-duplication and similarity scoring.
//
// Tokenization rules:
//   * text is split on Unicode whitespace into chunks; a chunk whose word
//     part starts with "http://" or "https://" is a URL and dropped whole;
//   * chunks are split on punctuation and symbols; '-' survives only between
//     two word characters ("cul-de-sac"), '_' is a word character;
//   * non-ASCII code points are word characters unless they are Unicode
//     whitespace or general punctuation;
//   * ASCII letters are lowercased, everything else is kept as-is.
//
// Stemming strips one suffix, first rule that applies, and only when at
// least three characters remain:
//   "ies" -> "y";  "es" after s/x/z/ch/sh;  "s" (not after s, u or i);
//   "ing";  "ed".

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace crisistl {

/// A token with its byte span [begin, end) in the source text.
struct Token {
  std::string lower;
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Decodes UTF-8 into code points; invalid bytes decode to U+FFFD.
std::vector<char32_t> utf8_decode(std::string_view text);
std::string utf8_encode(std::span<const char32_t> cps);

/// Number of code points in a UTF-8 string.
std::size_t utf8_length(std::string_view text);

std::string ascii_lower(std::string_view text);
std::string trim(std::string_view text);

bool is_unicode_space(char32_t cp);

std::vector<Token> tokenize_spans(std::string_view text);

/// "#tag" occurrences: each token spans the tag without its '#'. A tag is a
/// '#' not preceded by a word character, followed by word characters.
std::vector<Token> hashtag_tokens(std::string_view text);

/// Lowercased tokens without stems.
std::vector<std::string> tokenize(std::string_view text);

std::string stem(std::string_view lower_word);

/// Lowercase tokens, each followed by its stem when the stem differs.
std::vector<std::string> normalize_text(std::string_view text);

/// The lowercase tokens joined by single spaces.
std::string normalized_joined(std::string_view text);

/// Length of the longest common subsequence, O(|a|·|b|) time, O(|b|) space.
template <typename T>
std::size_t lcs_length(std::span<const T> a, std::span<const T> b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> row(b.size() + 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::size_t diag = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      std::size_t up = row[j + 1];
      row[j + 1] = a[i] == b[j] ? diag + 1 : std::max(up, row[j]);
      diag = up;
    }
  }
  return row[b.size()];
}

/// 2·LCS / (|a| + |b|) on code points; 1.0 for two empty strings.
double match_ratio(std::string_view a, std::string_view b);

/// 64-bit FNV-1a; stable across platforms, used to derive per-item seeds.
std::uint64_t fnv1a(std::string_view text);

}  // namespace crisistl
