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

// Annotated timelines: label aggregation, annotator agreement, dataset
// statistics and stratified splits.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "crisistl/stream.hpp"
#include "crisistl/time.hpp"

namespace crisistl {

enum class ExclusionReason { kIrrelevant, kUninformative, kRepetitive };

std::string_view to_string(ExclusionReason r);
ExclusionReason parse_exclusion_reason(std::string_view name);

struct TimelineTweet {
  std::string id;
  std::string text;
  std::optional<Timestamp> time;
};

struct TweetLabel {
  bool in_timeline = true;
  /// Present iff in_timeline is false.
  std::optional<ExclusionReason> reason;
};

struct AnnotationSet {
  std::string annotator;
  /// Keyed by tweet id; one entry per non-seed tweet.
  std::map<std::string, TweetLabel> labels;
  std::string summary;
};

struct Timeline {
  std::string id;
  Domain domain = Domain::kOther;
  /// Chronological; the first tweet is the seed.
  std::vector<TimelineTweet> tweets;
  std::vector<AnnotationSet> annotations;
  /// Optional expert labels for non-seed tweets.
  std::optional<std::map<std::string, bool>> expert_labels;

  const TimelineTweet& seed() const { return tweets.at(0); }
  std::size_t non_seed_count() const { return tweets.empty() ? 0 : tweets.size() - 1; }
};

struct GoldTimeline {
  Timeline timeline;
  /// Majority label per non-seed tweet.
  std::map<std::string, bool> gold_labels;
  std::vector<std::string> reference_summaries;
  std::pair<std::string, std::string> reference_annotators;

  const std::string& id() const { return timeline.id; }
  /// Gold membership of tweet `index`; the seed is always in.
  bool in_timeline(std::size_t index) const;
  /// Tweets labeled in, seed first.
  std::vector<const TimelineTweet*> members() const;
};

/// Throws ValidationError.  Field names: "tweets", "id", "labels",
/// "labels.<tweet id>", "labels.<tweet id>.reason", "summary".
void validate(const Timeline& t);
void validate_annotation(const AnnotationSet& a, const Timeline& t);

/// Fraction of non-seed tweets with equal labels; 1.0 without non-seed
/// tweets. Throws ValidationError when the label sets differ.
double pairwise_agreement(const AnnotationSet& a, const AnnotationSet& b, const Timeline& t);

struct BestPair {
  std::size_t first = 0;
  std::size_t second = 0;
  double agreement = 0.0;
};

/// Annotator pair with maximal agreement, ties broken by the lexicographic
/// (annotator, annotator) pair. Needs at least two annotation sets.
BestPair best_annotator_pair(const Timeline& t);

/// Requires exactly three annotation sets.
GoldTimeline aggregate_majority(const Timeline& t);

/// Mean over timelines of the best pair agreement; 0 for an empty corpus.
double corpus_agreement(std::span<const Timeline> timelines);

struct ExpertAgreement {
  std::size_t timelines = 0;
  double agreement = 0.0;
};

/// Mean agreement between majority labels and expert labels over the
/// timelines that carry expert labels; nullopt when none do.
std::optional<ExpertAgreement> expert_agreement(std::span<const GoldTimeline> golds);

/// Length buckets [1-5], [6-12], [13-25], [26-].
inline constexpr std::size_t kBucketCount = 4;
std::size_t length_bucket(std::size_t length);
std::string_view bucket_label(std::size_t bucket);

enum class LengthMode {
  /// Number of tweets in the timeline.
  kAllTweets,
  /// Number of gold in-timeline tweets.
  kGoldMembers,
};

struct StatsOptions {
  /// Seeds count as "in" tweets; otherwise they are left out of every count.
  bool count_seed = true;
  LengthMode length_mode = LengthMode::kAllTweets;
};

struct DomainStats {
  std::size_t timelines = 0;
  std::size_t tweets = 0;
  std::size_t in = 0;
  std::size_t out = 0;
  std::array<std::size_t, kBucketCount> buckets{};
  /// Mean per-timeline fraction of in tweets, per bucket; nullopt when the
  /// bucket is empty.
  std::array<std::optional<double>, kBucketCount> in_fraction{};
};

struct DatasetStats {
  std::map<Domain, DomainStats> domains;
  DomainStats total;
};

DatasetStats dataset_stats(std::span<const GoldTimeline> golds, const StatsOptions& opt = {});

/// One row per domain (wildfire, traffic, fire, storm, other) plus "total":
/// domain,timelines,tweets,in,out,len_1_5,len_6_12,len_13_25,len_26_plus,
/// in_frac_1_5,in_frac_6_12,in_frac_13_25,in_frac_26_plus.
std::string stats_csv(const DatasetStats& stats);

struct Splits {
  std::vector<std::string> train;
  std::vector<std::string> dev;
  std::vector<std::string> test;

  const std::vector<std::string>& by_name(std::string_view name) const;
};

/// Strata are (domain, length bucket over all tweets). Each stratum is
/// shuffled with a seeded generator and cut by largest-remainder rounding of
/// the fractions (ties go to train, then dev, then test). Lists are sorted.
Splits stratified_split(std::span<const GoldTimeline> golds, std::array<double, 3> fractions,
                        std::uint64_t seed);

/// Uniform integer in [0, bound) by rejection sampling; unlike the standard
/// distributions the sequence is identical across standard libraries.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

nlohmann::json to_json(const Splits& s);
Splits splits_from_json(const nlohmann::json& j);
Splits load_splits(const std::filesystem::path& path);
void save_splits(const std::filesystem::path& path, const Splits& s);

nlohmann::json to_json(const AnnotationSet& a);
AnnotationSet annotation_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Timeline& t);
Timeline timeline_from_json(const nlohmann::json& j);
/// Timeline fields plus gold_labels, reference_summaries and
/// reference_annotators.
nlohmann::json to_json(const GoldTimeline& g);

/// JSON array of timelines.
std::vector<Timeline> load_timelines(const std::filesystem::path& path);
/// Objects carrying "gold_labels" are taken as aggregated; others go through
/// aggregate_majority.
std::vector<GoldTimeline> golds_from_json(const nlohmann::json& j);
std::vector<GoldTimeline> load_golds(const std::filesystem::path& path);
void save_golds(const std::filesystem::path& path, std::span<const GoldTimeline> golds);

/// Keeps the golds whose ids are listed, in list order. Unknown ids throw
/// NotFoundError.
std::vector<GoldTimeline> select_split(std::span<const GoldTimeline> golds,
                                       std::span<const std::string> ids);

/// Adapts an external dataset layout to Timeline through a field-mapping
/// document. Keys (defaults in parentheses):
///   id ("id"), domain ("domain"), tweets ("tweets"), tweet_id ("id"),
///   tweet_text ("text"), tweet_time (absent), annotations ("annotations"),
///   annotator ("annotator"), labels ("labels"), summary ("summary"),
///   reason ("reason"), expert_labels (absent),
///   labels_cover ("non_seed" | "all"), in_values ([true, 1, "1", "in",
///   "yes"]), domain_aliases ({}).
/// Paths may be dotted ("meta.domain"). Labels may be an array aligned with
/// the tweets, an object keyed by tweet id, or per-tweet objects holding
/// the label under "label" and the reason under the reason key.
struct DatasetMapping {
  nlohmann::json fields;

  static DatasetMapping from_json(const nlohmann::json& j);
};

std::vector<Timeline> map_dataset(const nlohmann::json& records, const DatasetMapping& mapping);
/// Reads a JSON array or JSON Lines file and maps every record.
std::vector<Timeline> load_mapped_dataset(const std::filesystem::path& data,
                                          const DatasetMapping& mapping);

}  // namespace crisistl
