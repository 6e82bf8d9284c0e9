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

#include <gtest/gtest.h>

#include <random>

#include "crisistl/error.hpp"
#include "crisistl/geo.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace crisistl;

namespace {

ResolvedLocation loc(std::string name, double lat, double lon, Granularity g) {
  ResolvedLocation r;
  r.mention = {name, EntityKind::kLocation, {}};
  r.entry = {std::move(name), {lat, lon}, g, "Fresno"};
  r.match_score = 1.0;
  return r;
}

}  // namespace

TEST(EditDistance, FrozenValues) {
  EXPECT_EQ(edit_distance("woodwrd lake", "woodward lake"), 1u);
  EXPECT_DOUBLE_EQ(edit_similarity("woodwrd lake", "woodward lake"), 0.9230769230769231);
  EXPECT_EQ(edit_distance("", "abc"), 3u);
  EXPECT_DOUBLE_EQ(edit_similarity("", ""), 1.0);
  EXPECT_EQ(edit_distance("caf\xc3\xa9", "cafe"), 1u);
}

TEST(Haversine, FrozenValues) {
  LatLon fresno{36.7378, -119.7871};
  LatLon la{34.0522, -118.2437};
  EXPECT_NEAR(haversine_km(fresno, la), 329.7570373314384, 1e-9);
  EXPECT_NEAR(haversine_km({0, 0}, {0, 180}), 20015.114442035923, 1e-6);
  EXPECT_DOUBLE_EQ(haversine_km(fresno, fresno), 0.0);
}

TEST(Haversine, AgreesWithLawOfCosines) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> lat(-89.0, 89.0), lon(-180.0, 180.0);
  for (int i = 0; i < 100; ++i) {
    LatLon a{lat(rng), lon(rng)}, b{lat(rng), lon(rng)};
    double h = haversine_km(a, b);
    EXPECT_NEAR(h, oracle::law_of_cosines_km(a.lat, a.lon, b.lat, b.lon), 1e-6);
    EXPECT_DOUBLE_EQ(h, haversine_km(b, a));
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, 20015.2);
  }
}

TEST(Gazetteer, ResolvesFuzzyNameInArea) {
  auto g = load_gazetteer(testutil::fixture("pipeline/gazetteer.csv"));
  EXPECT_EQ(g.size(), 8u);
  EntityMention m{"Olive Avenu", EntityKind::kLocation, {}};
  auto r = resolve_location(m, "Fresno", g);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->entry.name, "Olive Avenue");
  EXPECT_EQ(r->entry.granularity, Granularity::kStreet);
  EXPECT_NEAR(r->match_score, 1.0 - 1.0 / 12.0, 1e-12);
}

TEST(Gazetteer, AreaRestrictsLookup) {
  auto g = load_gazetteer(testutil::fixture("pipeline/gazetteer.csv"));
  EntityMention m{"Clovis", EntityKind::kLocation, {}};
  EXPECT_FALSE(resolve_location(m, "Fresno", g).has_value());
  EXPECT_TRUE(resolve_location(m, "clovis", g).has_value());
}

TEST(Gazetteer, BelowThresholdUnresolved) {
  auto g = load_gazetteer(testutil::fixture("pipeline/gazetteer.csv"));
  EntityMention m{"Oak Avenue", EntityKind::kLocation, {}};
  EXPECT_FALSE(resolve_location(m, "Fresno", g).has_value());
}

TEST(Gazetteer, TieGoesToFinerGranularity) {
  auto g = parse_gazetteer(
      "name,lat,lon,granularity,area\n"
      "Maple,36.7,-119.7,city,Fresno\n"
      "Maple,36.8,-119.8,poi,Fresno\n");
  auto r = g.best_match("maple", "Fresno", 0.85);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->first->granularity, Granularity::kPoi);
}

TEST(Gazetteer, RejectsBadRows) {
  EXPECT_THROW(parse_gazetteer("name,lat,lon,granularity,area\nX,100,0,poi,A\n"), DataError);
  EXPECT_THROW(parse_gazetteer("name,lat,lon,granularity,area\nX,1,0,planet,A\n"), DataError);
  EXPECT_THROW(parse_gazetteer("name,lat,granularity,area\nX,1,poi,A\n"), DataError);
}

TEST(SmallestDistance, Granularities) {
  std::vector<ResolvedLocation> a{loc("Fresno", 36.7378, -119.7871, Granularity::kCity)};
  std::vector<ResolvedLocation> b{loc("Olive Avenue", 36.7571, -119.8010, Granularity::kStreet)};
  EXPECT_FALSE(smallest_distance(a, b).has_value());
  a.push_back(loc("Roeding Park", 36.7563, -119.8237, Granularity::kPoi));
  b.push_back(loc("Tower District", 36.8080, -119.8020, Granularity::kNeighborhood));
  auto d = smallest_distance(a, b);
  ASSERT_TRUE(d.has_value());
  double want = std::min(haversine_km({36.7563, -119.8237}, {36.7571, -119.8010}),
                         haversine_km({36.7563, -119.8237}, {36.8080, -119.8020}));
  EXPECT_DOUBLE_EQ(*d, want);
  EXPECT_FALSE(smallest_distance({}, b).has_value());
}
