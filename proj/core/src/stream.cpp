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

#include "crisistl/stream.hpp"

#include <algorithm>
#include <unordered_set>

#include "crisistl/config.hpp"
#include "crisistl/error.hpp"
#include "crisistl/text.hpp"

namespace crisistl {
namespace {

using nlohmann::json;

bool contains_sequence(std::span<const std::string> haystack,
                       std::span<const std::string> needle) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    if (std::equal(needle.begin(), needle.end(), haystack.begin() + i)) return true;
  }
  return false;
}

bool mentions_candidate(std::string_view text, const std::vector<std::string>& candidates) {
  auto tokens = tokenize(text);
  for (const auto& c : candidates) {
    if (contains_sequence(tokens, tokenize(c))) return true;
  }
  return false;
}

std::string normalize_hashtag(std::string_view tag) {
  if (!tag.empty() && tag.front() == '#') tag.remove_prefix(1);
  return ascii_lower(tag);
}

}  // namespace

std::string_view to_string(Domain d) {
  switch (d) {
    case Domain::kWildfire: return "wildfire";
    case Domain::kFire: return "fire";
    case Domain::kStorm: return "storm";
    case Domain::kTraffic: return "traffic";
    case Domain::kOther: return "other";
  }
  return "other";
}

Domain parse_domain(std::string_view name) {
  std::string n = ascii_lower(name);
  if (n == "wildfire") return Domain::kWildfire;
  if (n == "fire" || n == "local fire" || n == "local_fire") return Domain::kFire;
  if (n == "storm") return Domain::kStorm;
  if (n == "traffic") return Domain::kTraffic;
  if (n == "other") return Domain::kOther;
  throw ValidationError("unknown domain '" + std::string(name) + "'", "domain");
}

bool valid_lat_lon(const LatLon& p) {
  return p.lat >= -90.0 && p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0;
}

std::vector<std::string> hashtags_in(std::string_view text) {
  std::vector<std::string> out;
  for (auto& t : hashtag_tokens(text)) {
    if (std::find(out.begin(), out.end(), t.lower) == out.end()) out.push_back(std::move(t.lower));
  }
  return out;
}

json tweet_to_json(const RawTweet& t) {
  json j = {{"id", t.id}, {"time", format_rfc3339(t.time)}, {"text", t.text}};
  if (t.geo) j["geo"] = {{"lat", t.geo->lat}, {"lon", t.geo->lon}};
  if (t.user_location) j["user_location"] = *t.user_location;
  j["hashtags"] = t.hashtags;
  return j;
}

RawTweet tweet_from_json(const json& j) {
  if (!j.is_object()) throw DataError("not a JSON object");
  auto require_string = [&](const char* key) -> std::string {
    auto it = j.find(key);
    if (it == j.end()) throw DataError(std::string("missing field '") + key + "'");
    if (!it->is_string()) throw DataError(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
  };
  RawTweet t;
  t.id = require_string("id");
  if (t.id.empty()) throw DataError("field 'id' is empty");
  t.time = parse_rfc3339(require_string("time"));
  t.text = require_string("text");
  if (auto it = j.find("geo"); it != j.end() && !it->is_null()) {
    if (!it->is_object() || !it->contains("lat") || !it->contains("lon") ||
        !(*it)["lat"].is_number() || !(*it)["lon"].is_number()) {
      throw DataError("field 'geo' must be {\"lat\":number,\"lon\":number}");
    }
    LatLon p{(*it)["lat"].get<double>(), (*it)["lon"].get<double>()};
    if (!valid_lat_lon(p)) throw DataError("geo coordinates out of range");
    t.geo = p;
  }
  if (auto it = j.find("user_location"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw DataError("field 'user_location' must be a string");
    t.user_location = it->get<std::string>();
  }
  if (auto it = j.find("hashtags"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw DataError("field 'hashtags' must be an array");
    for (const auto& h : *it) {
      if (!h.is_string()) throw DataError("hashtags must be strings");
      std::string tag = normalize_hashtag(h.get<std::string>());
      if (!tag.empty() && std::find(t.hashtags.begin(), t.hashtags.end(), tag) == t.hashtags.end()) {
        t.hashtags.push_back(std::move(tag));
      }
    }
  } else {
    t.hashtags = hashtags_in(t.text);
  }
  return t;
}

void sort_stream(std::vector<RawTweet>& tweets) {
  std::sort(tweets.begin(), tweets.end(), [](const RawTweet& a, const RawTweet& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.id < b.id;
  });
}

std::vector<RawTweet> parse_stream(std::string_view text) {
  std::vector<RawTweet> out;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    try {
      RawTweet t = tweet_from_json(j);
      if (!seen.insert(t.id).second) throw DataError("duplicate tweet id '" + t.id + "'");
      out.push_back(std::move(t));
    } catch (const DataError& e) {
      throw DataError(e.what(), line_no);
    }
  }
  sort_stream(out);
  return out;
}

std::vector<RawTweet> load_stream(const std::filesystem::path& path) {
  return parse_stream(read_file(path));
}

std::string serialize_stream(std::span<const RawTweet> tweets) {
  std::string out;
  for (const auto& t : tweets) {
    out += tweet_to_json(t).dump();
    out.push_back('\n');
  }
  return out;
}

bool match_area(const RawTweet& tweet, const AreaSpec& area) {
  if (mentions_candidate(tweet.text, area.candidates)) return true;
  if (tweet.geo && area.bounding_box && area.bounding_box->contains(*tweet.geo)) return true;
  if (tweet.user_location && mentions_candidate(*tweet.user_location, area.candidates)) {
    return true;
  }
  return false;
}

bool match_keywords(const RawTweet& tweet, const KeywordSet& keywords) {
  auto forms = normalize_text(tweet.text);
  std::unordered_set<std::string> present(forms.begin(), forms.end());
  for (const auto& phrase : keywords.keywords) {
    auto words = tokenize(phrase);
    if (words.empty()) continue;
    bool all = std::all_of(words.begin(), words.end(), [&](const std::string& w) {
      return present.count(w) > 0 || present.count(stem(w)) > 0;
    });
    if (all) return true;
  }
  return false;
}

std::vector<RawTweet> filter_window(std::span<const RawTweet> tweets,
                                    const StreamWindow& window) {
  std::vector<RawTweet> out;
  for (const auto& t : tweets) {
    if (t.time < window.start || t.time >= window.end) continue;
    if (!match_area(t, window.area)) continue;
    if (!match_keywords(t, window.keywords)) continue;
    out.push_back(t);
  }
  return out;
}

void validate(const StreamWindow& window) {
  if (window.area.candidates.empty()) {
    throw ValidationError("area needs at least one candidate", "area.candidates");
  }
  for (const auto& k : window.keywords.keywords) {
    if (trim(k).empty()) throw ValidationError("empty keyword phrase", "keywords");
  }
  if (!(window.start < window.end)) {
    throw ValidationError("window start must precede end", "window");
  }
  if (auto& b = window.area.bounding_box) {
    if (!valid_lat_lon({b->min_lat, b->min_lon}) || !valid_lat_lon({b->max_lat, b->max_lon}) ||
        b->min_lat > b->max_lat || b->min_lon > b->max_lon) {
      throw ValidationError("invalid bounding box", "area.bounding_box");
    }
  }
}

}  // namespace crisistl
