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

#include "crisistl/text.hpp"

namespace crisistl {
namespace {

struct CodePoint {
  char32_t value;
  std::size_t begin;
  std::size_t size;
};

CodePoint decode_at(std::string_view s, std::size_t pos) {
  auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
  unsigned char c = byte(pos);
  if (c < 0x80) return {c, pos, 1};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((c & 0xE0) == 0xC0) {
    len = 2;
    cp = c & 0x1F;
  } else if ((c & 0xF0) == 0xE0) {
    len = 3;
    cp = c & 0x0F;
  } else if ((c & 0xF8) == 0xF0) {
    len = 4;
    cp = c & 0x07;
  } else {
    return {0xFFFD, pos, 1};
  }
  if (pos + len > s.size()) return {0xFFFD, pos, 1};
  for (std::size_t i = 1; i < len; ++i) {
    unsigned char cc = byte(pos + i);
    if ((cc & 0xC0) != 0x80) return {0xFFFD, pos, 1};
    cp = (cp << 6) | (cc & 0x3F);
  }
  return {cp, pos, len};
}

std::vector<CodePoint> decode_with_offsets(std::string_view s) {
  std::vector<CodePoint> out;
  out.reserve(s.size());
  for (std::size_t pos = 0; pos < s.size();) {
    CodePoint cp = decode_at(s, pos);
    out.push_back(cp);
    pos += cp.size;
  }
  return out;
}

bool is_unicode_punct(char32_t cp) {
  if (cp < 0x80) return false;
  if (cp >= 0xA1 && cp <= 0xBF) return cp != 0xAA && cp != 0xB5 && cp != 0xBA;
  if (cp == 0xD7 || cp == 0xF7) return true;
  if (cp >= 0x2010 && cp <= 0x2027) return true;
  if (cp >= 0x2030 && cp <= 0x205E) return true;
  if (cp >= 0x2190 && cp <= 0x23FF) return true;
  if (cp >= 0x2500 && cp <= 0x27BF) return true;
  if (cp >= 0x3000 && cp <= 0x303F) return true;
  if (cp >= 0xFE30 && cp <= 0xFE4F) return true;
  if (cp >= 0xFF01 && cp <= 0xFF0F) return true;
  if (cp >= 0xFF1A && cp <= 0xFF20) return true;
  if (cp >= 0xFF3B && cp <= 0xFF40) return true;
  if (cp >= 0xFF5B && cp <= 0xFF65) return true;
  if (cp >= 0x1F000 && cp <= 0x1FAFF) return true;  // emoji and pictographs
  if (cp == 0xFE0F || cp == 0x200D || cp == 0xFFFD) return true;
  return false;
}

bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') ||
           (cp >= '0' && cp <= '9') || cp == '_';
  }
  return !is_unicode_space(cp) && !is_unicode_punct(cp);
}

bool is_space(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' ||
         cp == '\v' || is_unicode_space(cp);
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    char c = s[i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c != prefix[i]) return false;
  }
  return true;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void split_chunk(std::string_view text, std::span<const CodePoint> cps,
                 std::vector<Token>& out) {
  std::size_t i = 0;
  while (i < cps.size()) {
    if (!is_word_char(cps[i].value)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < cps.size()) {
      if (is_word_char(cps[j].value)) {
        ++j;
      } else if (cps[j].value == '-' && j + 1 < cps.size() &&
                 is_word_char(cps[j + 1].value) && j > i) {
        ++j;
      } else {
        break;
      }
    }
    std::size_t begin = cps[i].begin;
    std::size_t end = cps[j - 1].begin + cps[j - 1].size;
    out.push_back({ascii_lower(text.substr(begin, end - begin)), begin, end});
    i = j;
  }
}

}  // namespace

std::vector<char32_t> utf8_decode(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  for (std::size_t pos = 0; pos < text.size();) {
    CodePoint cp = decode_at(text, pos);
    out.push_back(cp.value);
    pos += cp.size;
  }
  return out;
}

std::string utf8_encode(std::span<const char32_t> cps) {
  std::string out;
  for (char32_t cp : cps) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

std::size_t utf8_length(std::string_view text) {
  std::size_t n = 0;
  for (std::size_t pos = 0; pos < text.size(); ++n) pos += decode_at(text, pos).size;
  return n;
}

std::string ascii_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string trim(std::string_view text) {
  auto cps = decode_with_offsets(text);
  std::size_t i = 0;
  while (i < cps.size() && is_space(cps[i].value)) ++i;
  std::size_t j = cps.size();
  while (j > i && is_space(cps[j - 1].value)) --j;
  if (i == j) return {};
  std::size_t begin = cps[i].begin;
  std::size_t end = cps[j - 1].begin + cps[j - 1].size;
  return std::string(text.substr(begin, end - begin));
}

bool is_unicode_space(char32_t cp) {
  return cp == 0x85 || cp == 0xA0 || cp == 0x1680 ||
         (cp >= 0x2000 && cp <= 0x200B) || cp == 0x2028 || cp == 0x2029 ||
         cp == 0x202F || cp == 0x205F || cp == 0x3000 || cp == 0xFEFF;
}

std::vector<Token> tokenize_spans(std::string_view text) {
  std::vector<Token> out;
  auto cps = decode_with_offsets(text);
  std::size_t i = 0;
  while (i < cps.size()) {
    if (is_space(cps[i].value)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < cps.size() && !is_space(cps[j].value)) ++j;
    std::span<const CodePoint> chunk(cps.data() + i, j - i);
    // URL check on the chunk minus leading punctuation such as "(".
    std::size_t k = 0;
    while (k < chunk.size() && !is_word_char(chunk[k].value)) ++k;
    bool is_url = false;
    if (k < chunk.size()) {
      std::size_t from = chunk[k].begin;
      std::size_t to = chunk.back().begin + chunk.back().size;
      std::string_view word = text.substr(from, to - from);
      is_url = starts_with_ci(word, "http://") || starts_with_ci(word, "https://");
    }
    if (!is_url) split_chunk(text, chunk, out);
    i = j;
  }
  return out;
}

std::vector<Token> hashtag_tokens(std::string_view text) {
  std::vector<Token> out;
  auto cps = decode_with_offsets(text);
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (cps[i].value != '#') continue;
    if (i > 0 && is_word_char(cps[i - 1].value)) continue;
    std::size_t j = i + 1;
    while (j < cps.size() && is_word_char(cps[j].value)) ++j;
    if (j == i + 1) continue;
    std::size_t begin = cps[i + 1].begin;
    std::size_t end = cps[j - 1].begin + cps[j - 1].size;
    out.push_back({ascii_lower(text.substr(begin, end - begin)), begin, end});
    i = j - 1;
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  for (auto& t : tokenize_spans(text)) out.push_back(std::move(t.lower));
  return out;
}

std::string stem(std::string_view w) {
  constexpr std::size_t kMinStem = 3;
  auto base_of = [&](std::size_t suffix) { return w.substr(0, w.size() - suffix); };
  if (ends_with(w, "ies") && w.size() - 3 >= kMinStem) {
    return std::string(base_of(3)) + "y";
  }
  if (ends_with(w, "es") && w.size() - 2 >= kMinStem) {
    std::string_view base = base_of(2);
    if (ends_with(base, "s") || ends_with(base, "x") || ends_with(base, "z") ||
        ends_with(base, "ch") || ends_with(base, "sh")) {
      return std::string(base);
    }
  }
  if (ends_with(w, "s") && w.size() - 1 >= kMinStem && !ends_with(w, "ss") &&
      !ends_with(w, "us") && !ends_with(w, "is")) {
    return std::string(base_of(1));
  }
  if (ends_with(w, "ing") && w.size() - 3 >= kMinStem) return std::string(base_of(3));
  if (ends_with(w, "ed") && w.size() - 2 >= kMinStem) return std::string(base_of(2));
  return std::string(w);
}

std::vector<std::string> normalize_text(std::string_view text) {
  std::vector<std::string> out;
  for (auto& tok : tokenize_spans(text)) {
    std::string s = stem(tok.lower);
    out.push_back(std::move(tok.lower));
    if (s != out.back()) out.push_back(std::move(s));
  }
  return out;
}

std::string normalized_joined(std::string_view text) {
  std::string out;
  for (const auto& tok : tokenize_spans(text)) {
    if (!out.empty()) out.push_back(' ');
    out += tok.lower;
  }
  return out;
}

double match_ratio(std::string_view a, std::string_view b) {
  auto ca = utf8_decode(a);
  auto cb = utf8_decode(b);
  if (ca.empty() && cb.empty()) return 1.0;
  std::size_t l = lcs_length<char32_t>(ca, cb);
  return 2.0 * static_cast<double>(l) / static_cast<double>(ca.size() + cb.size());
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace crisistl
