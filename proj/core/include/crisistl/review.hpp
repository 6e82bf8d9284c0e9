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

// Human review state: merge-decision and timeline-refine tasks persisted as
// an append-only JSON Lines log with periodic snapshots.
//
// Data directory layout:
//   log.jsonl      {"seq", "task_id", "kind", "body"} per line, seq from 1;
//                  kind is task_created, decision or annotation
//   snapshot.json  {"seq", "state"}; the state after record `seq`
// The log is never truncated, so replaying it from empty yields the current
// state; the snapshot only shortens start-up.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crisistl/pipeline.hpp"
#include "crisistl/timeline.hpp"

namespace crisistl {

enum class TaskKind { kMergeDecision, kTimelineRefine };
enum class TaskStatus { kOpen, kDone };

std::string_view to_string(TaskKind k);
TaskKind parse_task_kind(std::string_view name);
std::string_view to_string(TaskStatus s);
TaskStatus parse_task_status(std::string_view name);

struct ReviewTask {
  std::string id;
  TaskKind kind = TaskKind::kMergeDecision;
  TaskStatus status = TaskStatus::kOpen;
  /// Bumped on every accepted submission.
  std::uint64_t version = 0;
  std::optional<MergeCandidate> merge;
  std::optional<Timeline> timeline;
  /// Accepted refine annotations, one per reviewer.
  std::vector<AnnotationSet> annotations;
  std::optional<GoldTimeline> gold;
  /// Last submitting reviewer.
  std::string reviewer;
  std::optional<Timestamp> updated_at;
};

nlohmann::json to_json(const ReviewTask& t);
ReviewTask review_task_from_json(const nlohmann::json& j);

/// "m-<a>-<b>" for merge candidates and "r-<timeline id>" for timelines.
ReviewTask make_merge_task(const MergeCandidate& c);
ReviewTask make_refine_task(const Timeline& t);

class ReviewStore {
 public:
  struct Options {
    /// Empty: in-memory only.
    std::filesystem::path data_dir;
    std::size_t snapshot_every = 1000;
    std::function<Timestamp()> clock;
  };

  /// Loads the snapshot and replays the rest of the log. A corrupt record
  /// throws DataError naming the line.
  explicit ReviewStore(Options options);
  ReviewStore();
  ~ReviewStore();

  ReviewStore(const ReviewStore&) = delete;
  ReviewStore& operator=(const ReviewStore&) = delete;

  /// Adds a task unless one with the same id exists. Returns true if added.
  bool create_task(const ReviewTask& task);

  std::vector<ReviewTask> list(std::optional<TaskKind> kind = std::nullopt,
                               std::optional<TaskStatus> status = std::nullopt) const;
  /// Throws NotFoundError.
  ReviewTask get(const std::string& id) const;

  /// Closes a merge task. ConflictError when the task is done or
  /// `expected_version` is stale; ValidationError for a pending decision or a
  /// refine task.
  ReviewTask submit_decision(const std::string& id, MergeDecision decision,
                             const std::string& reviewer,
                             std::optional<std::uint64_t> expected_version = std::nullopt);

  /// Adds one reviewer's annotation to a refine task. The task closes and
  /// its gold record appears with the third distinct reviewer.
  ReviewTask submit_annotation(const std::string& id, const AnnotationSet& annotation,
                               std::optional<std::uint64_t> expected_version = std::nullopt);

  std::vector<GoldTimeline> gold() const;
  /// Decided merge candidates in task id order.
  std::vector<MergeCandidate> decisions() const;

  /// Canonical state document; equal states dump to equal bytes.
  nlohmann::json state_json() const;
  std::string state_dump() const;
  nlohmann::json stats_json() const;
  std::uint64_t last_seq() const;

  /// State obtained by replaying `log_path` from empty.
  static std::string replay_dump(const std::filesystem::path& log_path);

 private:
  struct State;

  void commit(const std::string& task_id, const std::string& kind, nlohmann::json body);
  void append_log(const nlohmann::json& record);
  void write_snapshot();
  Timestamp now() const;

  Options options_;
  std::unique_ptr<State> state_;
  mutable std::shared_mutex mutex_;
};

/// Result of applying human merge decisions to a cluster run.
struct RefineOutcome {
  ClusterRun run;
  /// Candidates remaining after the merges, excluding every decided pair.
  std::vector<MergeCandidate> requeue;
};

/// Merged decisions unite clusters transitively; rejected pairs are never
/// queued again. Unknown cluster ids throw NotFoundError.
RefineOutcome apply_decisions(const ClusterRun& run, std::span<const MergeCandidate> decisions);

/// Noisy timelines (no annotations) from clusters: members in time order,
/// the first one as seed.
std::vector<Timeline> noisy_timelines(const ClusterRun& run);

}  // namespace crisistl
