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

// Single-pass online clustering of processed tweets and the cluster
// post-processing steps (head merge, de-duplication, informativeness).
//
// Tweet similarity:
//   start at 0;
//   + s_hashtag when the hashtag sets intersect;
//   d = smallest distance between distance-eligible resolved locations;
//     d >= max_dist_km returns 0 immediately, d <= min_dist_km adds s_dist,
//     no eligible locations on either side adds nothing;
//   + (sum of matched entity-pair scores) / min(|E1|, |E2|, K), 0 when the
//     divisor is 0.
// With the default weights the result lies in [0, 1.5] and a pair without
// entity evidence scores at most 0.5, below the 0.7 join threshold.

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crisistl/entities.hpp"
#include "crisistl/geo.hpp"
#include "crisistl/stream.hpp"
#include "crisistl/time.hpp"

namespace crisistl {

struct ProcessedTweet {
  RawTweet raw;
  std::vector<EntityMention> entities;
  std::vector<ResolvedLocation> resolved;
  std::vector<std::string> hashtags;

  const std::string& id() const { return raw.id; }
  Timestamp time() const { return raw.time; }
};

using TweetPtr = std::shared_ptr<const ProcessedTweet>;

struct ClusteringConfig {
  Domain domain = Domain::kOther;
  double s_hashtag = 0.2;
  double s_dist = 0.3;
  double min_dist_km = 0.4;
  double max_dist_km = 4.0;
  double sim_threshold = 0.7;
  Duration time_threshold = std::chrono::hours{15};
  Duration expiration_threshold = std::chrono::hours{15};
  std::size_t tweet_threshold = 4;
  /// K: cap on matched entity pairs.
  std::size_t max_pairs = 5;
  double s_head = 1.0;
  double s_head_min = 0.8;
  double d_match = 0.8;
  /// Domains the informativeness filter applies to.
  std::set<Domain> informative_domains = {Domain::kStorm, Domain::kWildfire};

  /// Per-domain defaults: traffic joins within 3h instead of 15h; wildfire
  /// and storm accept locations up to 10 km apart instead of 4 km.
  static ClusteringConfig defaults_for(Domain domain);

  /// Throws ValidationError on a broken invariant.
  void validate() const;

  double max_similarity() const { return s_hashtag + s_dist + 1.0; }
};

struct EntityPair {
  std::size_t left = 0;   // index into the first tweet's entities
  std::size_t right = 0;  // index into the second tweet's entities
  double score = 0.0;
};

/// Greedy one-to-one matching: cross pairs sorted by (score desc, left
/// surface asc, right surface asc), accepted when both sides are unused and
/// the score is positive, at most `max_pairs` pairs.
std::vector<EntityPair> find_matching_entities(std::span<const EntityMention> a,
                                               std::span<const EntityMention> b,
                                               std::size_t max_pairs);
std::vector<EntityPair> find_matching_entities(const ProcessedTweet& a,
                                               const ProcessedTweet& b,
                                               std::size_t max_pairs);

/// The similarity above. Symmetric: arguments are put in canonical order
/// (tweet id, then entity surfaces) before matching.
double tweet_similarity(const ProcessedTweet& a, const ProcessedTweet& b,
                        const ClusteringConfig& cfg);

enum class ClusterState { kActive, kExpired, kFinalized };

std::string_view to_string(ClusterState s);
ClusterState parse_cluster_state(std::string_view name);

struct Cluster {
  std::string id;
  Domain domain = Domain::kOther;
  /// Ordered by (time, id).
  std::vector<TweetPtr> members;
  std::size_t head = 0;
  Timestamp last_update{};
  ClusterState state = ClusterState::kActive;

  const ProcessedTweet& head_tweet() const { return *members.at(head); }
  std::size_t size() const { return members.size(); }

  /// Re-sorts members and restores the head and last_update invariants: the
  /// head has the most entities, ties going to the most recent member.
  void normalize();
};

/// Index of the head among time-ordered members.
std::size_t select_head(std::span<const TweetPtr> members);

std::string cluster_id(std::size_t counter);

struct OnlineState {
  /// Ordered by id, which follows creation order.
  std::vector<Cluster> active;
  std::vector<Cluster> finalized;
  std::size_t created = 0;
  std::optional<Timestamp> last_time;
};

enum class AssignAction { kJoin, kCreate };

struct AssignmentRecord {
  std::string tweet_id;
  std::string cluster_id;
  /// Joined cluster's head similarity; for a new cluster, the best head
  /// similarity seen (0 without active clusters).
  double similarity = 0.0;
  AssignAction action = AssignAction::kCreate;

  bool operator==(const AssignmentRecord&) const = default;
};

/// Adds one tweet. The tweet joins the active cluster with the highest head
/// similarity when that similarity exceeds sim_threshold and the cluster was
/// updated less than time_threshold ago; ties go to the most recently
/// updated cluster, then the smaller id. Otherwise a new cluster starts.
/// Throws ValidationError for an out-of-order tweet.
AssignmentRecord cluster_step(OnlineState& state, TweetPtr tweet, const ClusteringConfig& cfg);

struct ExpireResult {
  std::vector<Cluster> removed;
  std::vector<std::string> finalized_ids;
};

/// Active clusters idle for at least expiration_threshold are removed when
/// smaller than tweet_threshold and finalized otherwise.
ExpireResult expire_clusters(OnlineState& state, Timestamp now, const ClusteringConfig& cfg);

/// End of stream: applies the expiration rule to every active cluster as if
/// infinitely idle. Returns the clusters removed.
std::vector<Cluster> flush_clusters(OnlineState& state, const ClusteringConfig& cfg);

enum class MergeDecision { kPending, kMerged, kRejected };

std::string_view to_string(MergeDecision d);
MergeDecision parse_merge_decision(std::string_view name);

struct MergeCandidate {
  std::string cluster_a;
  std::string cluster_b;
  double head_similarity = 0.0;
  MergeDecision decision = MergeDecision::kPending;
  std::optional<std::string> decided_by;
};

struct MergeLogEntry {
  std::string cluster_a;
  std::string cluster_b;
  double similarity = 0.0;
  /// "auto" or "human".
  std::string source;
};

struct MergeResult {
  std::vector<Cluster> clusters;
  std::vector<MergeLogEntry> log;
  std::vector<MergeCandidate> candidates;
};

using ClusterPair = std::pair<std::string, std::string>;

/// Canonical (smaller id first).
ClusterPair make_pair_key(std::string a, std::string b);

/// Unites clusters whose pairs are given, transitively. Each group keeps its
/// smallest id; members are re-sorted and the head recomputed.
std::vector<Cluster> unite_clusters(std::span<const Cluster> clusters,
                                    std::span<const ClusterPair> pairs);

/// Candidate pairs with head similarity in (s_head_min, s_head], excluding
/// pairs that map onto `suppressed`.
std::vector<MergeCandidate> merge_candidates(std::span<const Cluster> clusters,
                                             const ClusteringConfig& cfg,
                                             const std::set<ClusterPair>& suppressed = {});

/// Merges all head pairs scoring above s_head (transitively) and queues the
/// pairs in (s_head_min, s_head] for human review.
MergeResult auto_merge(std::span<const Cluster> clusters, const ClusteringConfig& cfg,
                       const std::set<ClusterPair>& suppressed = {});

/// Drops members whose match ratio against any retained earlier member
/// exceeds d_match. The first member is always retained.
Cluster dedupe_cluster(const Cluster& cluster, const ClusteringConfig& cfg);

/// Tweet -> informative?  Implementations must be deterministic.
class InformativenessClassifier {
 public:
  virtual ~InformativenessClassifier() = default;
  virtual bool informative(const ProcessedTweet& tweet) const = 0;
};

/// Marks tweets uninformative when they contain a cue phrase (personal
/// emotion, prayers, donations). A phrase matches when its tokens appear
/// contiguously in the tweet, comparing stems.
class LexiconInformativeness final : public InformativenessClassifier {
 public:
  LexiconInformativeness();
  explicit LexiconInformativeness(std::vector<std::string> cue_phrases);

  bool informative(const ProcessedTweet& tweet) const override;

  static const std::vector<std::string>& default_cues();

 private:
  std::vector<std::vector<std::string>> cues_;
};

class AcceptAllInformativeness final : public InformativenessClassifier {
 public:
  bool informative(const ProcessedTweet&) const override { return true; }
};

/// Removes uninformative members when the cluster's domain is one of
/// cfg.informative_domains. Returns nullopt when nothing remains.
std::optional<Cluster> filter_informative(const Cluster& cluster,
                                          const InformativenessClassifier& classifier,
                                          const ClusteringConfig& cfg);

}  // namespace crisistl
