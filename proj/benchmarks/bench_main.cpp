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

#include <benchmark/benchmark.h>

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "crisistl/clustering.hpp"
#include "crisistl/evaluation.hpp"
#include "crisistl/text.hpp"
#include "crisistl/time.hpp"

using namespace crisistl;

namespace {

const std::vector<std::string> kVocab{"Creek Fire",   "Shaver Lake", "Highway 168", "Cal Fire",
                                      "Big Creek",    "Huntington Lake", "Auberry", "PG&E",
                                      "Olive Avenue", "Roeding Park"};

/// Random tweet with 0-5 entities, one hashtag in two, a location one in three.
ProcessedTweet random_tweet(std::mt19937_64& rng, std::size_t i, Timestamp time) {
  ProcessedTweet t;
  t.raw.id = "b" + std::to_string(i);
  t.raw.time = time;
  std::string text;
  for (std::size_t k = rng() % 6; k > 0; --k) {
    const auto& e = kVocab[rng() % kVocab.size()];
    std::size_t b = text.size();
    text += e + " ";
    t.entities.push_back({e, EntityKind::kNounArgument, {b, b + e.size()}});
  }
  if (rng() % 2) t.hashtags.push_back("creekfire");
  if (rng() % 3 == 0) {
    EntityMention m{"Shaver Lake", EntityKind::kLocation, {0, 11}};
    double jitter = static_cast<double>(rng() % 1000) / 10000.0;
    t.resolved.push_back({m, {"Shaver Lake", {37.10 + jitter, -119.31}, Granularity::kPoi, ""}, 1.0});
  }
  t.raw.text = text;
  t.raw.hashtags = t.hashtags;
  return t;
}

std::vector<TweetPtr> random_stream(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Timestamp time = parse_rfc3339("2020-09-05T00:00:00Z");
  std::vector<TweetPtr> out;
  for (std::size_t i = 0; i < n; ++i) {
    time += std::chrono::seconds{static_cast<long>(rng() % 120)};
    out.push_back(std::make_shared<const ProcessedTweet>(random_tweet(rng, i, time)));
  }
  return out;
}

void BM_TweetSimilarity(benchmark::State& state) {
  auto tweets = random_stream(256, 1);
  auto cfg = ClusteringConfig::defaults_for(Domain::kWildfire);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tweet_similarity(*tweets[i % 256], *tweets[(i * 7 + 3) % 256], cfg));
    ++i;
  }
}
BENCHMARK(BM_TweetSimilarity);

void BM_ClusterStream(benchmark::State& state) {
  auto tweets = random_stream(static_cast<std::size_t>(state.range(0)), 2);
  auto cfg = ClusteringConfig::defaults_for(Domain::kWildfire);
  for (auto _ : state) {
    OnlineState st;
    for (const auto& t : tweets) {
      cluster_step(st, t, cfg);
      expire_clusters(st, t->time(), cfg);
    }
    benchmark::DoNotOptimize(flush_clusters(st, cfg));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ClusterStream)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_RougeL(benchmark::State& state) {
  std::mt19937_64 rng(3);
  auto words = [&](std::size_t n) {
    std::vector<std::string> v(n);
    for (auto& w : v) w = "w" + std::to_string(rng() % 50);
    return v;
  };
  auto a = words(static_cast<std::size_t>(state.range(0)));
  auto b = words(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(rouge_l(a, b));
}
BENCHMARK(BM_RougeL)->Arg(50)->Arg(400);

void BM_MatchRatio(benchmark::State& state) {
  std::string a = "crews are holding the creek fire north of shaver lake along highway 168";
  std::string b = "creek fire crews holding north of shaver lake on highway 168 tonight";
  for (auto _ : state) benchmark::DoNotOptimize(match_ratio(a, b));
}
BENCHMARK(BM_MatchRatio);

void BM_DedupeCluster(benchmark::State& state) {
  auto tweets = random_stream(static_cast<std::size_t>(state.range(0)), 4);
  auto cfg = ClusteringConfig::defaults_for(Domain::kWildfire);
  Cluster c;
  c.id = cluster_id(1);
  c.members = tweets;
  c.normalize();
  for (auto _ : state) benchmark::DoNotOptimize(dedupe_cluster(c, cfg));
}
BENCHMARK(BM_DedupeCluster)->Arg(20)->Arg(100);

}  // namespace
BENCHMARK_MAIN();
