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

// Loading, ordering and filtering of a replayed tweet stream.

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "crisistl/time.hpp"

namespace crisistl {

enum class Domain { kWildfire, kFire, kStorm, kTraffic, kOther };

std::string_view to_string(Domain d);
Domain parse_domain(std::string_view name);

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;

  bool operator==(const LatLon&) const = default;
};

bool valid_lat_lon(const LatLon& p);

struct RawTweet {
  std::string id;
  Timestamp time{};
  std::string text;
  std::optional<LatLon> geo;
  std::optional<std::string> user_location;
  /// Lowercase, without '#'.
  std::vector<std::string> hashtags;
};

/// Hashtags as written in `text`, lowercased, de-duplicated, in order.
std::vector<std::string> hashtags_in(std::string_view text);

struct BoundingBox {
  double min_lat = 0.0;
  double min_lon = 0.0;
  double max_lat = 0.0;
  double max_lon = 0.0;

  bool contains(const LatLon& p) const {
    return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon && p.lon <= max_lon;
  }
};

struct AreaSpec {
  std::string name;
  std::vector<std::string> candidates;
  std::optional<BoundingBox> bounding_box;
};

struct KeywordSet {
  Domain domain = Domain::kOther;
  std::vector<std::string> keywords;
};

struct StreamWindow {
  AreaSpec area;
  KeywordSet keywords;
  Timestamp start{};
  Timestamp end{};
};

/// Parses JSON Lines. Blank lines are skipped; errors name the line.
std::vector<RawTweet> parse_stream(std::string_view text);
std::vector<RawTweet> load_stream(const std::filesystem::path& path);

/// One JSON object per tweet, terminated by '\n'.
std::string serialize_stream(std::span<const RawTweet> tweets);

nlohmann::json tweet_to_json(const RawTweet& t);
RawTweet tweet_from_json(const nlohmann::json& j);

/// Sorts by (time, id).
void sort_stream(std::vector<RawTweet>& tweets);

bool match_area(const RawTweet& tweet, const AreaSpec& area);
bool match_keywords(const RawTweet& tweet, const KeywordSet& keywords);

/// Keeps tweets with start <= time < end that match both the area and the
/// keywords, preserving order.
std::vector<RawTweet> filter_window(std::span<const RawTweet> tweets,
                                    const StreamWindow& window);

/// Validates AreaSpec/KeywordSet/StreamWindow invariants; throws
/// ValidationError.
void validate(const StreamWindow& window);

}  // namespace crisistl
