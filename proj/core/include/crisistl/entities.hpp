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

// Entity mentions per tweet: tagger output (person, organization,
// location), short noun arguments and hashtags.
//
// Noun arguments stand in for an OpenIE extractor. Two chunking rules run
// over tokens that are adjacent in the text (separated by whitespace only)
// and not preceded by '#' or '@':
//   1. a maximal run of capitalized tokens, minus leading stopwords;
//   2. a determiner (a, an, the, this, that, these, those) followed by up
//      to two lowercase alphabetic non-stopword tokens; the chunk is the
//      tokens after the determiner.
// Chunks are kept only when shorter than ten code points.
//
// De-duplication is by (lowercased surface, kind). Across kinds, a
// noun_argument is dropped when any other mention shares its surface, and a
// person/organization is dropped when a location shares it. Hashtags are
// kept next to tagger mentions of the same surface.

#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "crisistl/stream.hpp"

namespace crisistl {

enum class EntityKind { kPerson, kOrganization, kLocation, kHashtag, kNounArgument };

std::string_view to_string(EntityKind k);
EntityKind parse_entity_kind(std::string_view name);

/// Smaller is stronger: location, person/organization, hashtag,
/// noun_argument.
int kind_priority(EntityKind k);

struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const CharSpan&) const = default;
};

struct EntityMention {
  std::string surface;
  EntityKind kind = EntityKind::kNounArgument;
  /// Byte offsets into the tweet text, on UTF-8 boundaries.
  CharSpan span;

  bool needs_resolution() const { return kind == EntityKind::kLocation; }
};

/// Text -> person/organization/location mentions. Implementations must be
/// deterministic and safe for concurrent calls.
class Tagger {
 public:
  virtual ~Tagger() = default;
  virtual std::vector<EntityMention> tag(std::string_view text) const = 0;
};

struct LexiconEntry {
  std::string surface;
  EntityKind kind = EntityKind::kLocation;
};

/// Lexicon CSV: header "surface,kind", kind in {person, organization,
/// location}.
std::vector<LexiconEntry> load_lexicon(const std::filesystem::path& path);
std::vector<LexiconEntry> parse_lexicon(std::string_view csv);

/// Dictionary tagger: longest lexicon phrase wins at each position, scanning
/// left to right without overlaps. A phrase token matches a text token when
/// their lowercase forms or their stems are equal.
class DictionaryTagger final : public Tagger {
 public:
  DictionaryTagger() = default;
  explicit DictionaryTagger(std::vector<LexiconEntry> entries);

  void add(LexiconEntry entry);
  std::size_t size() const { return phrases_.size(); }

  std::vector<EntityMention> tag(std::string_view text) const override;

 private:
  struct Phrase {
    std::vector<std::string> stems;
    EntityKind kind;
  };
  std::vector<Phrase> phrases_;
  std::size_t max_len_ = 0;
};

/// A tagger that returns nothing.
class NullTagger final : public Tagger {
 public:
  std::vector<EntityMention> tag(std::string_view) const override { return {}; }
};

std::vector<EntityMention> extract_hashtags(const RawTweet& tweet);
std::vector<EntityMention> extract_noun_arguments(std::string_view text);

/// Union of tagger output, noun arguments and hashtags, de-duplicated as
/// described at the top of this header; ordered by span then kind. A failing
/// tagger surfaces as StageError naming the tweet.
std::vector<EntityMention> extract_entities(const RawTweet& tweet, const Tagger& tagger);

/// Symmetric score in [0, 1]: 1 for a case-insensitive exact match,
/// otherwise 0.5·Jaccard(token sets) + 0.5·Dice(character trigram sets).
double entity_similarity(const EntityMention& a, const EntityMention& b);
double entity_similarity(std::string_view a, std::string_view b);

}  // namespace crisistl
