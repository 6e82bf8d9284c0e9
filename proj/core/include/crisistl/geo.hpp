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

// Offline gazetteer lookup and great-circle distances.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "crisistl/entities.hpp"
#include "crisistl/stream.hpp"

namespace crisistl {

/// Ordered from finest to coarsest.
enum class Granularity { kPoi, kStreet, kNeighborhood, kCity, kState, kCountry };

std::string_view to_string(Granularity g);
Granularity parse_granularity(std::string_view name);

/// Sub-city granularities take part in distance computations.
inline bool distance_eligible(Granularity g) {
  return g == Granularity::kPoi || g == Granularity::kStreet ||
         g == Granularity::kNeighborhood;
}

struct GazetteerEntry {
  std::string name;
  LatLon position;
  Granularity granularity = Granularity::kPoi;
  std::string area;
};

struct ResolvedLocation {
  EntityMention mention;
  GazetteerEntry entry;
  double match_score = 0.0;
};

inline constexpr double kEarthRadiusKm = 6371.0088;
inline constexpr double kResolutionThreshold = 0.85;

double haversine_km(const LatLon& a, const LatLon& b);

/// Levenshtein distance over code points.
std::size_t edit_distance(std::string_view a, std::string_view b);

/// 1 - distance / max(len); 1.0 for two empty strings. Callers lowercase.
double edit_similarity(std::string_view a, std::string_view b);

/// Immutable after construction; lookups are thread-safe.
class Gazetteer {
 public:
  Gazetteer() = default;
  explicit Gazetteer(std::vector<GazetteerEntry> entries);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::span<const GazetteerEntry> entries() const { return entries_; }

  /// Best fuzzy match among entries of `area` (case-insensitive) scoring at
  /// least `threshold`. Ties: finer granularity, then lexicographic name.
  std::optional<std::pair<const GazetteerEntry*, double>> best_match(
      std::string_view name, std::string_view area, double threshold) const;

 private:
  std::vector<GazetteerEntry> entries_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_area_;
  std::vector<std::string> lower_names_;
};

/// CSV with columns name,lat,lon,granularity,area (any order).
Gazetteer load_gazetteer(const std::filesystem::path& path);
Gazetteer parse_gazetteer(std::string_view csv);

/// Gazetteer names as location lexicon entries for DictionaryTagger.
std::vector<LexiconEntry> gazetteer_lexicon(const Gazetteer& g);

/// Resolution strategy for location mentions. The default wraps an offline
/// gazetteer; a live geocoder can implement the same contract.
class LocationResolver {
 public:
  virtual ~LocationResolver() = default;
  virtual std::optional<ResolvedLocation> resolve(const EntityMention& mention,
                                                  std::string_view area) const = 0;
};

class GazetteerResolver final : public LocationResolver {
 public:
  explicit GazetteerResolver(const Gazetteer& gazetteer,
                             double threshold = kResolutionThreshold)
      : gazetteer_(&gazetteer), threshold_(threshold) {}

  std::optional<ResolvedLocation> resolve(const EntityMention& mention,
                                          std::string_view area) const override;

 private:
  const Gazetteer* gazetteer_;
  double threshold_;
};

std::optional<ResolvedLocation> resolve_location(const EntityMention& mention,
                                                 std::string_view area,
                                                 const Gazetteer& gazetteer);

/// Minimum distance over pairs of distance-eligible resolved locations;
/// nullopt when either side has none.
std::optional<double> smallest_distance(std::span<const ResolvedLocation> a,
                                        std::span<const ResolvedLocation> b);

}  // namespace crisistl
