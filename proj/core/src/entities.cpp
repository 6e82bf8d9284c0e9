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

#include "crisistl/entities.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

#include "crisistl/config.hpp"
#include "crisistl/error.hpp"
#include "crisistl/text.hpp"

namespace crisistl {
namespace {

const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> kWords = {
      "a",      "an",     "the",    "this",   "that",    "these",  "those",
      "is",     "are",    "was",    "were",   "be",      "been",   "being",
      "am",     "has",    "have",   "had",    "do",      "does",   "did",
      "will",   "would",  "can",    "could",  "should",  "may",    "might",
      "must",   "shall",  "on",     "in",     "at",      "of",     "for",
      "to",     "from",   "by",     "with",   "about",   "into",   "over",
      "under",  "near",   "after",  "before", "and",     "or",     "but",
      "not",    "no",     "so",     "if",     "as",      "it",     "its",
      "i",      "we",     "you",    "he",     "she",     "they",   "me",
      "us",     "him",    "her",    "them",   "my",      "our",    "your",
      "his",    "their",  "there",  "here",   "what",    "which",  "who",
      "when",   "where",  "why",    "how",    "all",     "any",    "some",
      "very",   "just",   "now",    "up",     "down",    "out",    "off",
      "rt",     "via",    "breaking", "update", "new",   "more",   "still",
      "also",   "than",   "then",   "too",    "again",   "please", "amp"};
  return kWords;
}

bool is_determiner(std::string_view w) {
  return w == "a" || w == "an" || w == "the" || w == "this" || w == "that" ||
         w == "these" || w == "those";
}

bool is_capitalized(std::string_view original) {
  return !original.empty() && original[0] >= 'A' && original[0] <= 'Z';
}

bool is_lower_alpha(std::string_view w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), [](char c) {
           return (c >= 'a' && c <= 'z') || c == '-';
         });
}

bool only_spaces_between(std::string_view text, std::size_t from, std::size_t to) {
  for (std::size_t i = from; i < to; ++i) {
    char c = text[i];
    if (c != ' ' && c != '\t') return false;
  }
  return true;
}

bool prefixed_by_tag_marker(std::string_view text, const Token& t) {
  return t.begin > 0 && (text[t.begin - 1] == '#' || text[t.begin - 1] == '@');
}

EntityMention mention_over(std::string_view text, std::size_t begin, std::size_t end,
                           EntityKind kind) {
  return {std::string(text.substr(begin, end - begin)), kind, {begin, end}};
}

std::set<std::string> trigrams(std::string_view lower) {
  auto cps = utf8_decode(lower);
  std::set<std::string> out;
  for (std::size_t i = 0; i + 3 <= cps.size(); ++i) {
    out.insert(utf8_encode(std::span<const char32_t>(cps.data() + i, 3)));
  }
  return out;
}

template <typename Set>
std::size_t intersection_size(const Set& a, const Set& b) {
  std::size_t n = 0;
  for (const auto& x : a) n += b.count(x);
  return n;
}

}  // namespace

std::string_view to_string(EntityKind k) {
  switch (k) {
    case EntityKind::kPerson: return "person";
    case EntityKind::kOrganization: return "organization";
    case EntityKind::kLocation: return "location";
    case EntityKind::kHashtag: return "hashtag";
    case EntityKind::kNounArgument: return "noun_argument";
  }
  return "noun_argument";
}

EntityKind parse_entity_kind(std::string_view name) {
  std::string n = ascii_lower(trim(name));
  if (n == "person" || n == "per") return EntityKind::kPerson;
  if (n == "organization" || n == "org") return EntityKind::kOrganization;
  if (n == "location" || n == "loc") return EntityKind::kLocation;
  if (n == "hashtag") return EntityKind::kHashtag;
  if (n == "noun_argument") return EntityKind::kNounArgument;
  throw ValidationError("unknown entity kind '" + std::string(name) + "'", "kind");
}

int kind_priority(EntityKind k) {
  switch (k) {
    case EntityKind::kLocation: return 0;
    case EntityKind::kPerson:
    case EntityKind::kOrganization: return 1;
    case EntityKind::kHashtag: return 2;
    case EntityKind::kNounArgument: return 3;
  }
  return 3;
}

std::vector<LexiconEntry> parse_lexicon(std::string_view csv) {
  auto rows = parse_csv(csv);
  std::vector<LexiconEntry> out;
  if (rows.empty()) return out;
  int surface_col = -1;
  int kind_col = -1;
  for (std::size_t i = 0; i < rows[0].size(); ++i) {
    std::string h = ascii_lower(trim(rows[0][i]));
    if (h == "surface") surface_col = static_cast<int>(i);
    if (h == "kind") kind_col = static_cast<int>(i);
  }
  if (surface_col < 0 || kind_col < 0) {
    throw DataError("lexicon: header must contain 'surface' and 'kind'", 1);
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    std::size_t need = static_cast<std::size_t>(std::max(surface_col, kind_col));
    if (row.size() <= need) throw DataError("lexicon: too few columns", r + 1);
    std::string surface = trim(row[surface_col]);
    if (surface.empty()) throw DataError("lexicon: empty surface", r + 1);
    EntityKind kind;
    try {
      kind = parse_entity_kind(row[kind_col]);
    } catch (const ValidationError& e) {
      throw DataError(std::string("lexicon: ") + e.what(), r + 1);
    }
    if (kind == EntityKind::kHashtag || kind == EntityKind::kNounArgument) {
      throw DataError("lexicon: kind must be person, organization or location", r + 1);
    }
    out.push_back({std::move(surface), kind});
  }
  return out;
}

std::vector<LexiconEntry> load_lexicon(const std::filesystem::path& path) {
  return parse_lexicon(read_file(path));
}

DictionaryTagger::DictionaryTagger(std::vector<LexiconEntry> entries) {
  for (auto& e : entries) add(std::move(e));
}

void DictionaryTagger::add(LexiconEntry entry) {
  Phrase p;
  for (const auto& tok : tokenize(entry.surface)) p.stems.push_back(stem(tok));
  if (p.stems.empty()) return;
  p.kind = entry.kind;
  for (auto& existing : phrases_) {
    if (existing.stems == p.stems) {
      if (kind_priority(p.kind) < kind_priority(existing.kind)) existing.kind = p.kind;
      return;
    }
  }
  max_len_ = std::max(max_len_, p.stems.size());
  phrases_.push_back(std::move(p));
}

std::vector<EntityMention> DictionaryTagger::tag(std::string_view text) const {
  std::vector<EntityMention> out;
  auto tokens = tokenize_spans(text);
  std::vector<std::string> stems;
  stems.reserve(tokens.size());
  for (const auto& t : tokens) stems.push_back(stem(t.lower));

  std::size_t i = 0;
  while (i < tokens.size()) {
    if (prefixed_by_tag_marker(text, tokens[i])) {
      ++i;
      continue;
    }
    const Phrase* best = nullptr;
    for (const auto& p : phrases_) {
      std::size_t n = p.stems.size();
      if (i + n > tokens.size()) continue;
      if (best && n <= best->stems.size()) continue;
      bool ok = true;
      for (std::size_t k = 0; k < n && ok; ++k) {
        ok = stems[i + k] == p.stems[k];
        if (ok && k > 0) {
          ok = only_spaces_between(text, tokens[i + k - 1].end, tokens[i + k].begin);
        }
      }
      if (ok) best = &p;
    }
    if (best) {
      std::size_t last = i + best->stems.size() - 1;
      out.push_back(mention_over(text, tokens[i].begin, tokens[last].end, best->kind));
      i = last + 1;
    } else {
      ++i;
    }
  }
  return out;
}

std::vector<EntityMention> extract_hashtags(const RawTweet& tweet) {
  std::vector<EntityMention> out;
  std::unordered_set<std::string> seen;
  for (auto& t : hashtag_tokens(tweet.text)) {
    if (!seen.insert(t.lower).second) continue;
    out.push_back({std::move(t.lower), EntityKind::kHashtag, {t.begin, t.end}});
  }
  return out;
}

std::vector<EntityMention> extract_noun_arguments(std::string_view text) {
  constexpr std::size_t kMaxChars = 10;  // strictly shorter than this
  auto tokens = tokenize_spans(text);
  std::vector<EntityMention> candidates;
  auto adjacent = [&](std::size_t a, std::size_t b) {
    return only_spaces_between(text, tokens[a].end, tokens[b].begin) &&
           !prefixed_by_tag_marker(text, tokens[b]);
  };
  auto original = [&](std::size_t i) {
    return text.substr(tokens[i].begin, tokens[i].end - tokens[i].begin);
  };

  // Rule 1: capitalized runs.
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (prefixed_by_tag_marker(text, tokens[i]) || !is_capitalized(original(i))) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < tokens.size() && adjacent(j - 1, j) && is_capitalized(original(j))) ++j;
    std::size_t first = i;
    while (first < j && stopwords().count(tokens[first].lower)) ++first;
    if (first < j) {
      candidates.push_back(mention_over(text, tokens[first].begin, tokens[j - 1].end,
                                        EntityKind::kNounArgument));
    }
    i = j;
  }

  // Rule 2: determiner-led chunks.
  for (std::size_t d = 0; d + 1 < tokens.size(); ++d) {
    if (!is_determiner(tokens[d].lower)) continue;
    std::size_t end = d;
    for (std::size_t k = d + 1; k < tokens.size() && k <= d + 2; ++k) {
      if (!adjacent(k - 1, k)) break;
      const std::string& w = tokens[k].lower;
      if (!is_lower_alpha(original(k)) || stopwords().count(w)) break;
      end = k;
    }
    if (end > d) {
      candidates.push_back(mention_over(text, tokens[d + 1].begin, tokens[end].end,
                                        EntityKind::kNounArgument));
    }
  }

  std::stable_sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    return a.span.begin < b.span.begin;
  });
  std::vector<EntityMention> out;
  std::unordered_set<std::string> seen;
  for (auto& m : candidates) {
    if (utf8_length(m.surface) >= kMaxChars) continue;
    if (!seen.insert(ascii_lower(m.surface)).second) continue;
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<EntityMention> extract_entities(const RawTweet& tweet, const Tagger& tagger) {
  std::vector<EntityMention> tagged;
  try {
    tagged = tagger.tag(tweet.text);
  } catch (const std::exception& e) {
    throw StageError("entity-extraction", tweet.id, e.what());
  }
  for (const auto& m : tagged) {
    if (m.span.begin >= m.span.end || m.span.end > tweet.text.size() || m.surface.empty()) {
      throw StageError("entity-extraction", tweet.id, "tagger returned an invalid span");
    }
    if (m.kind == EntityKind::kHashtag || m.kind == EntityKind::kNounArgument) {
      throw StageError("entity-extraction", tweet.id, "tagger returned a non-tagger kind");
    }
  }

  std::vector<EntityMention> all = std::move(tagged);
  for (auto& m : extract_noun_arguments(tweet.text)) all.push_back(std::move(m));
  for (auto& m : extract_hashtags(tweet)) all.push_back(std::move(m));

  // Strongest kind per lowercased surface among tagger kinds.
  std::map<std::string, int> best_tagger_rank;
  std::set<std::string> hashtag_surfaces;
  for (const auto& m : all) {
    std::string key = ascii_lower(m.surface);
    if (m.kind == EntityKind::kHashtag) {
      hashtag_surfaces.insert(key);
    } else if (m.kind != EntityKind::kNounArgument) {
      auto [it, inserted] = best_tagger_rank.emplace(key, kind_priority(m.kind));
      if (!inserted) it->second = std::min(it->second, kind_priority(m.kind));
    }
  }

  std::vector<EntityMention> out;
  std::set<std::pair<std::string, EntityKind>> seen;
  for (auto& m : all) {
    std::string key = ascii_lower(m.surface);
    if (m.kind == EntityKind::kNounArgument &&
        (best_tagger_rank.count(key) || hashtag_surfaces.count(key))) {
      continue;
    }
    if (m.kind == EntityKind::kPerson || m.kind == EntityKind::kOrganization) {
      if (best_tagger_rank[key] < kind_priority(m.kind)) continue;
    }
    if (!seen.emplace(key, m.kind).second) continue;
    out.push_back(std::move(m));
  }
  std::stable_sort(out.begin(), out.end(), [](const EntityMention& a, const EntityMention& b) {
    if (a.span.begin != b.span.begin) return a.span.begin < b.span.begin;
    if (a.span.end != b.span.end) return a.span.end < b.span.end;
    return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  });
  return out;
}

double entity_similarity(std::string_view a, std::string_view b) {
  std::string la = ascii_lower(a);
  std::string lb = ascii_lower(b);
  if (la == lb) return 1.0;
  auto ta = tokenize(la);
  auto tb = tokenize(lb);
  std::set<std::string> sa(ta.begin(), ta.end());
  std::set<std::string> sb(tb.begin(), tb.end());
  double jaccard = 0.0;
  if (!sa.empty() || !sb.empty()) {
    std::size_t inter = intersection_size(sa, sb);
    jaccard = static_cast<double>(inter) / static_cast<double>(sa.size() + sb.size() - inter);
  }
  auto ga = trigrams(la);
  auto gb = trigrams(lb);
  double dice = 0.0;
  if (!ga.empty() || !gb.empty()) {
    dice = 2.0 * static_cast<double>(intersection_size(ga, gb)) /
           static_cast<double>(ga.size() + gb.size());
  }
  return 0.5 * jaccard + 0.5 * dice;
}

double entity_similarity(const EntityMention& a, const EntityMention& b) {
  return entity_similarity(a.surface, b.surface);
}

}  // namespace crisistl
