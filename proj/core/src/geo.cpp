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

#include "crisistl/geo.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "crisistl/config.hpp"
#include "crisistl/error.hpp"
#include "crisistl/text.hpp"

namespace crisistl {
namespace {

double to_radians(double deg) { return deg * std::numbers::pi / 180.0; }

double parse_coordinate(const std::string& field, std::size_t line, const char* what) {
  std::string s = trim(field);
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) {
    throw DataError(std::string("gazetteer: bad ") + what + " '" + s + "'", line);
  }
  return v;
}

}  // namespace

std::string_view to_string(Granularity g) {
  switch (g) {
    case Granularity::kPoi: return "poi";
    case Granularity::kStreet: return "street";
    case Granularity::kNeighborhood: return "neighborhood";
    case Granularity::kCity: return "city";
    case Granularity::kState: return "state";
    case Granularity::kCountry: return "country";
  }
  return "poi";
}

Granularity parse_granularity(std::string_view name) {
  std::string n = ascii_lower(trim(name));
  if (n == "poi") return Granularity::kPoi;
  if (n == "street") return Granularity::kStreet;
  if (n == "neighborhood" || n == "neighbourhood") return Granularity::kNeighborhood;
  if (n == "city") return Granularity::kCity;
  if (n == "state") return Granularity::kState;
  if (n == "country") return Granularity::kCountry;
  throw ValidationError("unknown granularity '" + std::string(name) + "'", "granularity");
}

double haversine_km(const LatLon& a, const LatLon& b) {
  double phi1 = to_radians(a.lat);
  double phi2 = to_radians(b.lat);
  double dphi = phi2 - phi1;
  double dlambda = to_radians(b.lon - a.lon);
  double s1 = std::sin(dphi / 2.0);
  double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  auto ca = utf8_decode(a);
  auto cb = utf8_decode(b);
  std::vector<std::size_t> row(cb.size() + 1);
  for (std::size_t j = 0; j <= cb.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= ca.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= cb.size(); ++j) {
      std::size_t up = row[j];
      std::size_t cost = ca[i - 1] == cb[j - 1] ? 0 : 1;
      row[j] = std::min({up + 1, row[j - 1] + 1, diag + cost});
      diag = up;
    }
  }
  return row[cb.size()];
}

double edit_similarity(std::string_view a, std::string_view b) {
  std::size_t la = utf8_length(a);
  std::size_t lb = utf8_length(b);
  std::size_t longest = std::max(la, lb);
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(edit_distance(a, b)) / static_cast<double>(longest);
}

Gazetteer::Gazetteer(std::vector<GazetteerEntry> entries) : entries_(std::move(entries)) {
  lower_names_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    lower_names_.push_back(ascii_lower(entries_[i].name));
    by_area_[ascii_lower(entries_[i].area)].push_back(i);
  }
}

std::optional<std::pair<const GazetteerEntry*, double>> Gazetteer::best_match(
    std::string_view name, std::string_view area, double threshold) const {
  auto it = by_area_.find(ascii_lower(area));
  if (it == by_area_.end()) return std::nullopt;
  std::string query = ascii_lower(trim(name));
  std::size_t qlen = utf8_length(query);
  const GazetteerEntry* best = nullptr;
  double best_score = -1.0;
  for (std::size_t idx : it->second) {
    const std::string& cand = lower_names_[idx];
    std::size_t clen = utf8_length(cand);
    std::size_t longest = std::max(qlen, clen);
    std::size_t gap = qlen > clen ? qlen - clen : clen - qlen;
    // Length gap alone bounds the similarity from above.
    if (longest > 0 && 1.0 - static_cast<double>(gap) / static_cast<double>(longest) < threshold) {
      continue;
    }
    double score = edit_similarity(query, cand);
    if (score < threshold) continue;
    const GazetteerEntry& e = entries_[idx];
    bool better = best == nullptr || score > best_score ||
                  (score == best_score &&
                   (e.granularity < best->granularity ||
                    (e.granularity == best->granularity && e.name < best->name)));
    if (better) {
      best = &e;
      best_score = score;
    }
  }
  if (!best) return std::nullopt;
  return std::make_pair(best, best_score);
}

Gazetteer parse_gazetteer(std::string_view csv) {
  auto rows = parse_csv(csv);
  if (rows.empty()) throw DataError("gazetteer: missing header", 1);
  const char* required[] = {"name", "lat", "lon", "granularity", "area"};
  int col[5];
  for (int k = 0; k < 5; ++k) {
    col[k] = -1;
    for (std::size_t i = 0; i < rows[0].size(); ++i) {
      if (ascii_lower(trim(rows[0][i])) == required[k]) col[k] = static_cast<int>(i);
    }
    if (col[k] < 0) {
      throw DataError(std::string("gazetteer: missing column '") + required[k] + "'", 1);
    }
  }
  std::size_t need = static_cast<std::size_t>(*std::max_element(col, col + 5));
  std::vector<GazetteerEntry> entries;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    std::size_t line = r + 1;
    if (row.size() <= need) throw DataError("gazetteer: too few columns", line);
    GazetteerEntry e;
    e.name = trim(row[col[0]]);
    if (e.name.empty()) throw DataError("gazetteer: empty name", line);
    e.position = {parse_coordinate(row[col[1]], line, "lat"),
                  parse_coordinate(row[col[2]], line, "lon")};
    if (!valid_lat_lon(e.position)) throw DataError("gazetteer: coordinates out of range", line);
    try {
      e.granularity = parse_granularity(row[col[3]]);
    } catch (const ValidationError& err) {
      throw DataError(std::string("gazetteer: ") + err.what(), line);
    }
    e.area = trim(row[col[4]]);
    entries.push_back(std::move(e));
  }
  return Gazetteer(std::move(entries));
}

Gazetteer load_gazetteer(const std::filesystem::path& path) {
  return parse_gazetteer(read_file(path));
}

std::vector<LexiconEntry> gazetteer_lexicon(const Gazetteer& g) {
  std::vector<LexiconEntry> out;
  for (const auto& e : g.entries()) out.push_back({e.name, EntityKind::kLocation});
  return out;
}

std::optional<ResolvedLocation> GazetteerResolver::resolve(const EntityMention& mention,
                                                           std::string_view area) const {
  if (mention.kind != EntityKind::kLocation) return std::nullopt;
  auto match = gazetteer_->best_match(mention.surface, area, threshold_);
  if (!match) return std::nullopt;
  return ResolvedLocation{mention, *match->first, match->second};
}

std::optional<ResolvedLocation> resolve_location(const EntityMention& mention,
                                                 std::string_view area,
                                                 const Gazetteer& gazetteer) {
  return GazetteerResolver(gazetteer).resolve(mention, area);
}

std::optional<double> smallest_distance(std::span<const ResolvedLocation> a,
                                        std::span<const ResolvedLocation> b) {
  std::optional<double> best;
  for (const auto& x : a) {
    if (!distance_eligible(x.entry.granularity)) continue;
    for (const auto& y : b) {
      if (!distance_eligible(y.entry.granularity)) continue;
      double d = haversine_km(x.entry.position, y.entry.position);
      if (!best || d < *best) best = d;
    }
  }
  return best;
}

}  // namespace crisistl
