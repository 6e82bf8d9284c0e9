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

// End-to-end timeline collection: window filter, entity extraction,
// location resolution, online clustering, head merge, de-duplication and the
// informativeness filter. Also the JSON formats of cluster runs.

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crisistl/clustering.hpp"
#include "crisistl/entities.hpp"
#include "crisistl/geo.hpp"
#include "crisistl/stream.hpp"

namespace crisistl {

struct PipelineConfig {
  StreamWindow window;
  ClusteringConfig clustering;
  /// Location mentions without a gazetteer match leave the entity set.
  bool drop_unresolved_locations = true;
  /// Skips the window filter (input already filtered).
  bool prefiltered = false;
  double resolution_threshold = kResolutionThreshold;
  std::optional<std::filesystem::path> gazetteer_path;
  std::optional<std::filesystem::path> lexicon_path;
  std::optional<std::filesystem::path> cues_path;
};

/// Reads the TOML config. Sections: [area] (name, candidates,
/// bounding_box = [min_lat, min_lon, max_lat, max_lon]), [keywords.<domain>]
/// (keywords), [window] (domain, start, end), [clustering] (any
/// ClusteringConfig field; durations as "15h"), [postprocess]
/// (informative_domains, drop_unresolved_locations) and [resources]
/// (gazetteer, lexicon, cues; relative to the config file).
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
PipelineConfig parse_pipeline_config(std::string_view toml,
                                     const std::filesystem::path& base_dir = {});

/// Applies `overrides` (a JSON object of ClusteringConfig fields) on top of
/// `cfg`. Unknown keys raise ValidationError.
void apply_clustering_overrides(ClusteringConfig& cfg, const nlohmann::json& overrides);

nlohmann::json to_json(const ClusteringConfig& cfg);
ClusteringConfig clustering_config_from_json(const nlohmann::json& j);

/// Plug points. The pipeline does not own them.
struct PipelinePlugs {
  const Tagger* tagger = nullptr;
  const LocationResolver* resolver = nullptr;
  const InformativenessClassifier* classifier = nullptr;
};

/// Default plugs built from the configured resources: a dictionary tagger
/// over the lexicon plus gazetteer names, a gazetteer resolver and the cue
/// lexicon classifier.
class PipelineResources {
 public:
  explicit PipelineResources(const PipelineConfig& cfg);
  PipelineResources(Gazetteer gazetteer, std::vector<LexiconEntry> lexicon,
                    double threshold = kResolutionThreshold,
                    std::optional<std::vector<std::string>> cues = std::nullopt);

  PipelinePlugs plugs() const;
  const Gazetteer& gazetteer() const { return *gazetteer_; }

 private:
  std::unique_ptr<Gazetteer> gazetteer_;
  std::unique_ptr<DictionaryTagger> tagger_;
  std::unique_ptr<GazetteerResolver> resolver_;
  std::unique_ptr<LexiconInformativeness> classifier_;
};

/// Extraction and resolution for one tweet.
ProcessedTweet process_tweet(const RawTweet& tweet, const PipelineConfig& cfg,
                             const PipelinePlugs& plugs);

struct PipelineResult {
  std::vector<Cluster> clusters;
  std::vector<AssignmentRecord> assignment_log;
  std::vector<MergeLogEntry> merge_log;
  std::vector<MergeCandidate> merge_candidates;
  std::size_t input_tweets = 0;
  std::size_t filtered_tweets = 0;
  std::size_t expired_clusters = 0;
};

/// Runs every stage. The clustering domain follows the window's keyword set.
PipelineResult run_pipeline(std::span<const RawTweet> stream, const PipelineConfig& cfg,
                            const PipelinePlugs& plugs);

nlohmann::json to_json(const EntityMention& m);
EntityMention entity_mention_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ProcessedTweet& t);
ProcessedTweet processed_tweet_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AssignmentRecord& r);
nlohmann::json to_json(const MergeCandidate& c);
MergeCandidate merge_candidate_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MergeLogEntry& e);

/// A cluster run as written to clusters.json.
struct ClusterRun {
  ClusteringConfig config;
  std::vector<Cluster> clusters;
  std::vector<AssignmentRecord> assignment_log;
  std::vector<MergeLogEntry> merge_log;
};

/// Output document: {"config", "clusters": [{"id", "domain", "members",
/// "head", "last_update", "state"}], "assignment_log", "merge_log",
/// "tweets": [processed tweets referenced by the clusters]}.
nlohmann::json cluster_run_to_json(const ClusterRun& run);
ClusterRun cluster_run_from_json(const nlohmann::json& j);
ClusterRun load_cluster_run(const std::filesystem::path& path);
void save_cluster_run(const std::filesystem::path& path, const ClusterRun& run);

nlohmann::json merge_queue_to_json(std::span<const MergeCandidate> queue);
std::vector<MergeCandidate> merge_queue_from_json(const nlohmann::json& j);
std::vector<MergeCandidate> load_merge_queue(const std::filesystem::path& path);
void save_merge_queue(const std::filesystem::path& path, std::span<const MergeCandidate> queue);

/// Applies human merge decisions: every "merged" candidate is united with the
/// run's clusters, transitively. Rejected and pending candidates are
/// ignored. Appends "human" entries to the merge log.
ClusterRun apply_merge_decisions(const ClusterRun& run, std::span<const MergeCandidate> decisions);

/// Stable text form used for byte-identical comparisons.
std::string dump_json(const nlohmann::json& j);

}  // namespace crisistl
