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

#include "crisistl/review.hpp"

#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "crisistl/config.hpp"
#include "crisistl/error.hpp"
#include "crisistl/text.hpp"

namespace crisistl {

using nlohmann::json;

namespace {

constexpr std::size_t kAnnotationsRequired = 3;

Timestamp system_now() {
  return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

}  // namespace

struct ReviewStore::State {
  std::map<std::string, ReviewTask> tasks;
  std::uint64_t seq = 0;
  std::ofstream log;

  // Applies one log record. Throws on a record that does not fit the state;
  // live submissions are checked before they reach this point.
  void apply(const json& rec) {
    std::uint64_t s = rec.at("seq").get<std::uint64_t>();
    if (s != seq + 1) {
      throw DataError("expected seq " + std::to_string(seq + 1) + ", found " + std::to_string(s));
    }
    const std::string id = rec.at("task_id").get<std::string>();
    const std::string kind = rec.at("kind").get<std::string>();
    const json& body = rec.at("body");
    if (kind == "task_created") {
      ReviewTask t = review_task_from_json(body);
      if (t.id != id) throw DataError("task id mismatch");
      if (!tasks.emplace(id, std::move(t)).second) throw DataError("task " + id + " exists");
    } else if (kind == "decision") {
      ReviewTask& t = existing(id);
      if (t.kind != TaskKind::kMergeDecision || t.status != TaskStatus::kOpen) {
        throw DataError("decision on task " + id + " that is not an open merge task");
      }
      t.merge->decision = parse_merge_decision(body.at("decision").get<std::string>());
      t.reviewer = body.at("reviewer").get<std::string>();
      t.merge->decided_by = t.reviewer;
      t.status = TaskStatus::kDone;
      touch(t, body);
    } else if (kind == "annotation") {
      ReviewTask& t = existing(id);
      if (t.kind != TaskKind::kTimelineRefine || t.status != TaskStatus::kOpen) {
        throw DataError("annotation on task " + id + " that is not an open refine task");
      }
      AnnotationSet a = annotation_from_json(body.at("annotation"));
      validate_annotation(a, *t.timeline);
      for (const auto& prev : t.annotations) {
        if (prev.annotator == a.annotator) throw DataError("duplicate reviewer " + a.annotator);
      }
      t.reviewer = a.annotator;
      t.annotations.push_back(std::move(a));
      if (t.annotations.size() >= kAnnotationsRequired) {
        Timeline full = *t.timeline;
        full.annotations = t.annotations;
        t.gold = aggregate_majority(full);
        t.status = TaskStatus::kDone;
      }
      touch(t, body);
    } else {
      throw DataError("unknown record kind '" + kind + "'");
    }
    seq = s;
  }

  ReviewTask& existing(const std::string& id) {
    auto it = tasks.find(id);
    if (it == tasks.end()) throw DataError("unknown task " + id);
    return it->second;
  }

  static void touch(ReviewTask& t, const json& body) {
    std::uint64_t v = body.at("version").get<std::uint64_t>();
    if (v != t.version + 1) throw DataError("version " + std::to_string(v) + " out of sequence");
    t.version = v;
    t.updated_at = parse_rfc3339(body.at("time").get<std::string>());
  }

  /// Throws DataError naming `path` and `line_no`.
  void apply_line(const std::string& line, const std::filesystem::path& path,
                  std::size_t line_no) {
    try {
      apply(json::parse(line));
    } catch (const json::exception& e) {
      throw DataError(path.string() + ": log record: " + e.what(), line_no);
    } catch (const Error& e) {
      throw DataError(path.string() + ": log record: " + e.what(), line_no);
    }
  }

  json to_json_state() const {
    json arr = json::array();
    for (const auto& [id, t] : tasks) arr.push_back(to_json(t));
    return {{"seq", seq}, {"tasks", arr}};
  }
};

std::string_view to_string(TaskKind k) {
  return k == TaskKind::kMergeDecision ? "merge_decision" : "timeline_refine";
}

TaskKind parse_task_kind(std::string_view name) {
  if (name == "merge_decision") return TaskKind::kMergeDecision;
  if (name == "timeline_refine") return TaskKind::kTimelineRefine;
  throw ValidationError("unknown task kind '" + std::string(name) + "'", "kind");
}

std::string_view to_string(TaskStatus s) { return s == TaskStatus::kOpen ? "open" : "done"; }

TaskStatus parse_task_status(std::string_view name) {
  if (name == "open") return TaskStatus::kOpen;
  if (name == "done") return TaskStatus::kDone;
  throw ValidationError("unknown task status '" + std::string(name) + "'", "status");
}

json to_json(const ReviewTask& t) {
  json j = {{"id", t.id},
            {"kind", std::string(to_string(t.kind))},
            {"status", std::string(to_string(t.status))},
            {"version", t.version},
            {"reviewer", t.reviewer}};
  j["updated_at"] = t.updated_at ? json(format_rfc3339(*t.updated_at)) : json(nullptr);
  if (t.merge) j["merge"] = to_json(*t.merge);
  if (t.timeline) j["timeline"] = to_json(*t.timeline);
  json anns = json::array();
  for (const auto& a : t.annotations) anns.push_back(to_json(a));
  j["annotations"] = anns;
  j["gold"] = t.gold ? to_json(*t.gold) : json(nullptr);
  return j;
}

ReviewTask review_task_from_json(const json& j) {
  ReviewTask t;
  try {
    t.id = j.at("id").get<std::string>();
    t.kind = parse_task_kind(j.at("kind").get<std::string>());
    t.status = parse_task_status(j.value("status", "open"));
    t.version = j.value("version", std::uint64_t{0});
    t.reviewer = j.value("reviewer", "");
    if (auto it = j.find("updated_at"); it != j.end() && it->is_string()) {
      t.updated_at = parse_rfc3339(it->get<std::string>());
    }
    if (auto it = j.find("merge"); it != j.end() && !it->is_null()) {
      t.merge = merge_candidate_from_json(*it);
    }
    if (auto it = j.find("timeline"); it != j.end() && !it->is_null()) {
      t.timeline = timeline_from_json(*it);
    }
    for (const auto& a : j.value("annotations", json::array())) {
      t.annotations.push_back(annotation_from_json(a));
    }
    if (auto it = j.find("gold"); it != j.end() && !it->is_null()) {
      t.gold = golds_from_json(json::array({*it})).at(0);
    }
  } catch (const json::exception& e) {
    throw DataError("task: " + std::string(e.what()));
  } catch (const ValidationError& e) {
    throw DataError("task: " + std::string(e.what()));
  }
  if (t.kind == TaskKind::kMergeDecision && !t.merge) throw DataError("merge task without pair");
  if (t.kind == TaskKind::kTimelineRefine && !t.timeline) {
    throw DataError("refine task without timeline");
  }
  return t;
}

ReviewTask make_merge_task(const MergeCandidate& c) {
  ReviewTask t;
  auto [a, b] = make_pair_key(c.cluster_a, c.cluster_b);
  t.id = "m-" + a + "-" + b;
  t.kind = TaskKind::kMergeDecision;
  t.merge = c;
  t.merge->cluster_a = a;
  t.merge->cluster_b = b;
  t.merge->decision = MergeDecision::kPending;
  t.merge->decided_by.reset();
  return t;
}

ReviewTask make_refine_task(const Timeline& tl) {
  ReviewTask t;
  t.id = "r-" + tl.id;
  t.kind = TaskKind::kTimelineRefine;
  t.timeline = tl;
  t.timeline->annotations.clear();
  return t;
}

ReviewStore::ReviewStore() : ReviewStore(Options{}) {}

ReviewStore::ReviewStore(Options options)
    : options_(std::move(options)), state_(std::make_unique<State>()) {
  if (options_.snapshot_every == 0) options_.snapshot_every = 1000;
  if (options_.data_dir.empty()) return;
  std::filesystem::create_directories(options_.data_dir);
  auto snap = options_.data_dir / "snapshot.json";
  std::uint64_t snap_seq = 0;
  if (std::filesystem::exists(snap)) {
    try {
      json j = json::parse(read_file(snap));
      snap_seq = j.at("seq").get<std::uint64_t>();
      for (const auto& t : j.at("state").at("tasks")) {
        ReviewTask task = review_task_from_json(t);
        state_->tasks.emplace(task.id, std::move(task));
      }
      state_->seq = snap_seq;
    } catch (const json::exception& e) {
      throw DataError(snap.string() + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(snap.string() + ": " + e.what());
    }
  }
  auto log_path = options_.data_dir / "log.jsonl";
  if (std::filesystem::exists(log_path)) {
    std::istringstream in(read_file(log_path));
    std::string line;
    std::size_t line_no = 0;
    std::uint64_t records = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      if (++records <= snap_seq) continue;
      state_->apply_line(line, log_path, line_no);
    }
    if (records < snap_seq) throw DataError(log_path.string() + ": shorter than the snapshot");
  } else if (snap_seq > 0) {
    throw DataError(log_path.string() + ": missing but a snapshot exists");
  }
  state_->log.open(log_path, std::ios::app | std::ios::binary);
  if (!state_->log) throw Error("cannot open " + log_path.string() + " for appending");
}

ReviewStore::~ReviewStore() = default;

Timestamp ReviewStore::now() const { return options_.clock ? options_.clock() : system_now(); }

void ReviewStore::append_log(const json& record) {
  if (!state_->log.is_open()) return;
  state_->log << record.dump() << '\n';
  state_->log.flush();
  if (!state_->log) throw Error("failed to append to the review log");
}

void ReviewStore::write_snapshot() {
  if (options_.data_dir.empty()) return;
  json snap = {{"seq", state_->seq}, {"state", state_->to_json_state()}};
  write_file(options_.data_dir / "snapshot.json", snap.dump() + "\n");
}

void ReviewStore::commit(const std::string& task_id, const std::string& kind, json body) {
  json rec = {{"seq", state_->seq + 1}, {"task_id", task_id}, {"kind", kind}, {"body", body}};
  // Apply to a copy of the affected task first so a failing record never
  // reaches the log.
  State probe;
  probe.seq = state_->seq;
  if (kind != "task_created") probe.tasks.emplace(task_id, state_->tasks.at(task_id));
  probe.apply(rec);
  append_log(rec);
  state_->apply(rec);
  if (state_->seq % options_.snapshot_every == 0) write_snapshot();
}

bool ReviewStore::create_task(const ReviewTask& task) {
  std::unique_lock lock(mutex_);
  if (task.id.empty()) throw ValidationError("must not be empty", "id");
  if (state_->tasks.count(task.id)) return false;
  ReviewTask fresh = task;
  fresh.status = TaskStatus::kOpen;
  fresh.version = 0;
  fresh.annotations.clear();
  fresh.gold.reset();
  fresh.reviewer.clear();
  fresh.updated_at = now();
  if (fresh.kind == TaskKind::kMergeDecision && !fresh.merge) {
    throw ValidationError("merge task needs a candidate", "merge");
  }
  if (fresh.kind == TaskKind::kTimelineRefine) {
    if (!fresh.timeline) throw ValidationError("refine task needs a timeline", "timeline");
    fresh.timeline->annotations.clear();
    validate(*fresh.timeline);
  }
  commit(fresh.id, "task_created", to_json(fresh));
  return true;
}

std::vector<ReviewTask> ReviewStore::list(std::optional<TaskKind> kind,
                                          std::optional<TaskStatus> status) const {
  std::shared_lock lock(mutex_);
  std::vector<ReviewTask> out;
  for (const auto& [id, t] : state_->tasks) {
    if (kind && t.kind != *kind) continue;
    if (status && t.status != *status) continue;
    out.push_back(t);
  }
  return out;
}

ReviewTask ReviewStore::get(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = state_->tasks.find(id);
  if (it == state_->tasks.end()) throw NotFoundError("task '" + id + "' not found");
  return it->second;
}

ReviewTask ReviewStore::submit_decision(const std::string& id, MergeDecision decision,
                                        const std::string& reviewer,
                                        std::optional<std::uint64_t> expected_version) {
  std::unique_lock lock(mutex_);
  auto it = state_->tasks.find(id);
  if (it == state_->tasks.end()) throw NotFoundError("task '" + id + "' not found");
  const ReviewTask& t = it->second;
  if (t.kind != TaskKind::kMergeDecision) {
    throw ValidationError("task " + id + " is not a merge task", "kind");
  }
  if (t.status == TaskStatus::kDone) throw ConflictError("task " + id + " is already decided");
  if (expected_version && *expected_version != t.version) {
    throw ConflictError("task " + id + " is at version " + std::to_string(t.version));
  }
  if (decision == MergeDecision::kPending) {
    throw ValidationError("must be merged or rejected", "decision");
  }
  if (trim(reviewer).empty()) throw ValidationError("must not be empty", "reviewer");
  commit(id, "decision",
         {{"decision", std::string(to_string(decision))},
          {"reviewer", reviewer},
          {"version", t.version + 1},
          {"time", format_rfc3339(now())}});
  return state_->tasks.at(id);
}

ReviewTask ReviewStore::submit_annotation(const std::string& id, const AnnotationSet& annotation,
                                          std::optional<std::uint64_t> expected_version) {
  std::unique_lock lock(mutex_);
  auto it = state_->tasks.find(id);
  if (it == state_->tasks.end()) throw NotFoundError("task '" + id + "' not found");
  const ReviewTask& t = it->second;
  if (t.kind != TaskKind::kTimelineRefine) {
    throw ValidationError("task " + id + " is not a refine task", "kind");
  }
  if (t.status == TaskStatus::kDone) throw ConflictError("task " + id + " is closed");
  if (expected_version && *expected_version != t.version) {
    throw ConflictError("task " + id + " is at version " + std::to_string(t.version));
  }
  validate_annotation(annotation, *t.timeline);
  for (const auto& prev : t.annotations) {
    if (prev.annotator == annotation.annotator) {
      throw ConflictError("reviewer " + annotation.annotator + " already annotated " + id);
    }
  }
  commit(id, "annotation",
         {{"annotation", to_json(annotation)},
          {"version", t.version + 1},
          {"time", format_rfc3339(now())}});
  return state_->tasks.at(id);
}

std::vector<GoldTimeline> ReviewStore::gold() const {
  std::shared_lock lock(mutex_);
  std::vector<GoldTimeline> out;
  for (const auto& [id, t] : state_->tasks) {
    if (t.gold) out.push_back(*t.gold);
  }
  return out;
}

std::vector<MergeCandidate> ReviewStore::decisions() const {
  std::shared_lock lock(mutex_);
  std::vector<MergeCandidate> out;
  for (const auto& [id, t] : state_->tasks) {
    if (t.kind == TaskKind::kMergeDecision && t.status == TaskStatus::kDone) {
      out.push_back(*t.merge);
    }
  }
  return out;
}

json ReviewStore::state_json() const {
  std::shared_lock lock(mutex_);
  return state_->to_json_state();
}

std::string ReviewStore::state_dump() const { return state_json().dump(); }

json ReviewStore::stats_json() const {
  std::shared_lock lock(mutex_);
  json counts = {{"merge_decision", {{"open", 0}, {"done", 0}}},
                 {"timeline_refine", {{"open", 0}, {"done", 0}}}};
  std::size_t gold = 0;
  for (const auto& [id, t] : state_->tasks) {
    auto& c = counts[std::string(to_string(t.kind))][std::string(to_string(t.status))];
    c = c.get<int>() + 1;
    if (t.gold) ++gold;
  }
  return {{"tasks", counts}, {"gold", gold}, {"log_seq", state_->seq}};
}

std::uint64_t ReviewStore::last_seq() const {
  std::shared_lock lock(mutex_);
  return state_->seq;
}

std::string ReviewStore::replay_dump(const std::filesystem::path& log_path) {
  State s;
  std::istringstream in(read_file(log_path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    s.apply_line(line, log_path, line_no);
  }
  return s.to_json_state().dump();
}

RefineOutcome apply_decisions(const ClusterRun& run, std::span<const MergeCandidate> decisions) {
  std::map<std::string, const Cluster*> by_id;
  for (const auto& c : run.clusters) by_id[c.id] = &c;
  for (const auto& d : decisions) {
    for (const auto* id : {&d.cluster_a, &d.cluster_b}) {
      if (!by_id.count(*id)) throw NotFoundError("decision refers to unknown cluster '" + *id + "'");
    }
  }
  RefineOutcome out;
  out.run = apply_merge_decisions(run, decisions);
  std::map<std::string, std::string> root_of_tweet;
  for (const auto& c : out.run.clusters) {
    for (const auto& m : c.members) root_of_tweet[m->id()] = c.id;
  }
  auto root = [&](const std::string& id) {
    return root_of_tweet.at(by_id.at(id)->members.front()->id());
  };
  std::set<ClusterPair> decided;
  for (const auto& d : decisions) {
    if (d.decision == MergeDecision::kPending) continue;
    decided.insert(make_pair_key(root(d.cluster_a), root(d.cluster_b)));
  }
  out.requeue = merge_candidates(out.run.clusters, run.config, decided);
  return out;
}

std::vector<Timeline> noisy_timelines(const ClusterRun& run) {
  std::vector<Timeline> out;
  for (const auto& c : run.clusters) {
    Timeline t;
    t.id = c.id;
    t.domain = c.domain;
    for (const auto& m : c.members) t.tweets.push_back({m->id(), m->raw.text, m->time()});
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace crisistl
