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

#include "crisistl/pipeline.hpp"

#include <algorithm>
#include <map>

#include "crisistl/config.hpp"
#include "crisistl/error.hpp"
#include "crisistl/text.hpp"
#include "crisistl/time.hpp"

namespace crisistl {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key, const char* context) {
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(std::string("missing in ") + context, key);
  return *it;
}

std::string get_string(const json& j, const char* field) {
  if (!j.is_string()) throw ValidationError("must be a string", field);
  return j.get<std::string>();
}

double get_number(const json& j, const char* field) {
  if (!j.is_number()) throw ValidationError("must be a number", field);
  return j.get<double>();
}

std::vector<std::string> get_strings(const json& j, const char* field) {
  if (!j.is_array()) throw ValidationError("must be an array of strings", field);
  std::vector<std::string> out;
  for (const auto& v : j) out.push_back(get_string(v, field));
  return out;
}

Duration get_duration(const json& j, const char* field) {
  try {
    if (j.is_string()) return parse_duration(j.get<std::string>());
    if (j.is_number_integer()) return Duration{j.get<long long>()};
  } catch (const DataError& e) {
    throw ValidationError(e.what(), field);
  }
  throw ValidationError("must be a duration such as \"15h\"", field);
}

std::size_t get_count(const json& j, const char* field) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw ValidationError("must be a non-negative integer", field);
  }
  return j.get<std::size_t>();
}

std::filesystem::path resolve_path(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) return base / path;
  return path;
}

json resolved_to_json(const ResolvedLocation& r) {
  return {{"surface", r.mention.surface},
          {"span", {r.mention.span.begin, r.mention.span.end}},
          {"name", r.entry.name},
          {"lat", r.entry.position.lat},
          {"lon", r.entry.position.lon},
          {"granularity", std::string(to_string(r.entry.granularity))},
          {"area", r.entry.area},
          {"score", r.match_score}};
}

ResolvedLocation resolved_from_json(const json& j) {
  ResolvedLocation r;
  r.mention.surface = j.at("surface").get<std::string>();
  r.mention.kind = EntityKind::kLocation;
  r.mention.span = {j.at("span").at(0).get<std::size_t>(), j.at("span").at(1).get<std::size_t>()};
  r.entry.name = j.at("name").get<std::string>();
  r.entry.position = {j.at("lat").get<double>(), j.at("lon").get<double>()};
  r.entry.granularity = parse_granularity(j.at("granularity").get<std::string>());
  r.entry.area = j.value("area", "");
  r.match_score = j.value("score", 0.0);
  return r;
}

json cluster_to_json(const Cluster& c) {
  json members = json::array();
  for (const auto& m : c.members) members.push_back(m->id());
  return {{"id", c.id},
          {"domain", std::string(to_string(c.domain))},
          {"members", members},
          {"head", c.members.empty() ? std::string() : c.head_tweet().id()},
          {"last_update", format_rfc3339(c.last_update)},
          {"state", std::string(to_string(c.state))}};
}

}  // namespace

void apply_clustering_overrides(ClusteringConfig& cfg, const json& o) {
  if (!o.is_object()) throw ValidationError("must be a table", "clustering");
  for (auto it = o.begin(); it != o.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    const char* f = k.c_str();
    if (k == "domain") {
      cfg.domain = parse_domain(get_string(v, f));
    } else if (k == "s_hashtag") {
      cfg.s_hashtag = get_number(v, f);
    } else if (k == "s_dist") {
      cfg.s_dist = get_number(v, f);
    } else if (k == "min_dist_km") {
      cfg.min_dist_km = get_number(v, f);
    } else if (k == "max_dist_km") {
      cfg.max_dist_km = get_number(v, f);
    } else if (k == "sim_threshold") {
      cfg.sim_threshold = get_number(v, f);
    } else if (k == "time_threshold") {
      cfg.time_threshold = get_duration(v, f);
    } else if (k == "expiration_threshold") {
      cfg.expiration_threshold = get_duration(v, f);
    } else if (k == "tweet_threshold") {
      cfg.tweet_threshold = get_count(v, f);
    } else if (k == "max_pairs") {
      cfg.max_pairs = get_count(v, f);
    } else if (k == "s_head") {
      cfg.s_head = get_number(v, f);
    } else if (k == "s_head_min") {
      cfg.s_head_min = get_number(v, f);
    } else if (k == "d_match") {
      cfg.d_match = get_number(v, f);
    } else if (k == "informative_domains") {
      cfg.informative_domains.clear();
      for (const auto& d : get_strings(v, f)) cfg.informative_domains.insert(parse_domain(d));
    } else {
      throw ValidationError("unknown clustering option", k);
    }
  }
}

json to_json(const ClusteringConfig& cfg) {
  json domains = json::array();
  for (Domain d : cfg.informative_domains) domains.push_back(std::string(to_string(d)));
  return {{"domain", std::string(to_string(cfg.domain))},
          {"s_hashtag", cfg.s_hashtag},
          {"s_dist", cfg.s_dist},
          {"min_dist_km", cfg.min_dist_km},
          {"max_dist_km", cfg.max_dist_km},
          {"sim_threshold", cfg.sim_threshold},
          {"time_threshold", format_duration(cfg.time_threshold)},
          {"expiration_threshold", format_duration(cfg.expiration_threshold)},
          {"tweet_threshold", cfg.tweet_threshold},
          {"max_pairs", cfg.max_pairs},
          {"s_head", cfg.s_head},
          {"s_head_min", cfg.s_head_min},
          {"d_match", cfg.d_match},
          {"informative_domains", domains}};
}

ClusteringConfig clustering_config_from_json(const json& j) {
  Domain domain = Domain::kOther;
  if (j.contains("domain")) domain = parse_domain(get_string(j["domain"], "domain"));
  ClusteringConfig cfg = ClusteringConfig::defaults_for(domain);
  apply_clustering_overrides(cfg, j);
  cfg.validate();
  return cfg;
}

PipelineConfig parse_pipeline_config(std::string_view toml, const std::filesystem::path& base_dir) {
  json root = parse_toml(toml);
  PipelineConfig cfg;

  const json& area = require(root, "area", "config");
  cfg.window.area.name = get_string(require(area, "name", "[area]"), "area.name");
  cfg.window.area.candidates =
      get_strings(require(area, "candidates", "[area]"), "area.candidates");
  if (auto it = area.find("bounding_box"); it != area.end()) {
    if (!it->is_array() || it->size() != 4) {
      throw ValidationError("must be [min_lat, min_lon, max_lat, max_lon]", "area.bounding_box");
    }
    BoundingBox box{get_number((*it)[0], "area.bounding_box"),
                    get_number((*it)[1], "area.bounding_box"),
                    get_number((*it)[2], "area.bounding_box"),
                    get_number((*it)[3], "area.bounding_box")};
    if (box.min_lat > box.max_lat || box.min_lon > box.max_lon) {
      throw ValidationError("minimum exceeds maximum", "area.bounding_box");
    }
    cfg.window.area.bounding_box = box;
  }

  json window = root.value("window", json::object());
  Domain domain = Domain::kOther;
  if (window.contains("domain")) domain = parse_domain(get_string(window["domain"], "window.domain"));
  cfg.window.start = window.contains("start")
                         ? parse_rfc3339(get_string(window["start"], "window.start"))
                         : Timestamp{Duration{0}};
  cfg.window.end = window.contains("end")
                       ? parse_rfc3339(get_string(window["end"], "window.end"))
                       : parse_rfc3339("9999-12-31T23:59:59Z");

  std::string dname(to_string(domain));
  const json& keywords = require(root, "keywords", "config");
  auto ks = keywords.find(dname);
  if (ks == keywords.end()) throw ValidationError("missing [keywords." + dname + "]", "keywords");
  cfg.window.keywords.domain = domain;
  for (const auto& k : get_strings(require(*ks, "keywords", "[keywords]"), "keywords")) {
    cfg.window.keywords.keywords.push_back(ascii_lower(trim(k)));
  }
  validate(cfg.window);

  cfg.clustering = ClusteringConfig::defaults_for(domain);
  if (auto it = root.find("clustering"); it != root.end()) {
    json overrides = *it;
    if (overrides.contains("domain")) throw ValidationError("set the domain in [window]", "domain");
    apply_clustering_overrides(cfg.clustering, overrides);
  }
  if (auto it = root.find("postprocess"); it != root.end()) {
    if (auto d = it->find("informative_domains"); d != it->end()) {
      apply_clustering_overrides(cfg.clustering, {{"informative_domains", *d}});
    }
    if (auto d = it->find("drop_unresolved_locations"); d != it->end()) {
      if (!d->is_boolean()) throw ValidationError("must be a boolean", "drop_unresolved_locations");
      cfg.drop_unresolved_locations = d->get<bool>();
    }
  }
  cfg.clustering.validate();

  if (auto it = root.find("resources"); it != root.end()) {
    if (it->contains("gazetteer")) {
      cfg.gazetteer_path = resolve_path(base_dir, get_string((*it)["gazetteer"], "gazetteer"));
    }
    if (it->contains("lexicon")) {
      cfg.lexicon_path = resolve_path(base_dir, get_string((*it)["lexicon"], "lexicon"));
    }
    if (it->contains("cues")) {
      cfg.cues_path = resolve_path(base_dir, get_string((*it)["cues"], "cues"));
    }
    if (it->contains("resolution_threshold")) {
      cfg.resolution_threshold =
          get_number((*it)["resolution_threshold"], "resolution_threshold");
    }
  }
  return cfg;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  return parse_pipeline_config(read_file(path), path.parent_path());
}

PipelineResources::PipelineResources(const PipelineConfig& cfg) {
  Gazetteer g = cfg.gazetteer_path ? load_gazetteer(*cfg.gazetteer_path) : Gazetteer{};
  std::vector<LexiconEntry> lex = cfg.lexicon_path ? load_lexicon(*cfg.lexicon_path)
                                                   : std::vector<LexiconEntry>{};
  std::optional<std::vector<std::string>> cues;
  if (cfg.cues_path) {
    cues.emplace();
    for (const auto& line : parse_csv(read_file(*cfg.cues_path))) {
      if (!line.empty() && !trim(line[0]).empty()) cues->push_back(trim(line[0]));
    }
  }
  *this = PipelineResources(std::move(g), std::move(lex), cfg.resolution_threshold, cues);
}

PipelineResources::PipelineResources(Gazetteer gazetteer, std::vector<LexiconEntry> lexicon,
                                     double threshold,
                                     std::optional<std::vector<std::string>> cues)
    : gazetteer_(std::make_unique<Gazetteer>(std::move(gazetteer))) {
  auto entries = gazetteer_lexicon(*gazetteer_);
  entries.insert(entries.end(), lexicon.begin(), lexicon.end());
  tagger_ = std::make_unique<DictionaryTagger>(std::move(entries));
  resolver_ = std::make_unique<GazetteerResolver>(*gazetteer_, threshold);
  classifier_ = cues ? std::make_unique<LexiconInformativeness>(std::move(*cues))
                     : std::make_unique<LexiconInformativeness>();
}

PipelinePlugs PipelineResources::plugs() const {
  return {tagger_.get(), resolver_.get(), classifier_.get()};
}

ProcessedTweet process_tweet(const RawTweet& tweet, const PipelineConfig& cfg,
                             const PipelinePlugs& plugs) {
  static const NullTagger null_tagger;
  ProcessedTweet out;
  out.raw = tweet;
  out.hashtags = tweet.hashtags;
  auto entities = extract_entities(tweet, plugs.tagger ? *plugs.tagger : null_tagger);
  for (auto& m : entities) {
    if (!m.needs_resolution()) {
      out.entities.push_back(std::move(m));
      continue;
    }
    std::optional<ResolvedLocation> r;
    if (plugs.resolver) {
      try {
        r = plugs.resolver->resolve(m, cfg.window.area.name);
      } catch (const std::exception& e) {
        throw StageError("geo", tweet.id, e.what());
      }
    }
    if (r) out.resolved.push_back(std::move(*r));
    if (r || !cfg.drop_unresolved_locations) out.entities.push_back(std::move(m));
  }
  return out;
}

PipelineResult run_pipeline(std::span<const RawTweet> stream, const PipelineConfig& cfg,
                            const PipelinePlugs& plugs) {
  ClusteringConfig ccfg = cfg.clustering;
  ccfg.validate();
  static const AcceptAllInformativeness accept_all;
  const InformativenessClassifier& classifier = plugs.classifier ? *plugs.classifier : accept_all;

  PipelineResult result;
  result.input_tweets = stream.size();
  std::vector<RawTweet> filtered;
  if (cfg.prefiltered) {
    filtered.assign(stream.begin(), stream.end());
  } else {
    validate(cfg.window);
    filtered = filter_window(stream, cfg.window);
  }
  result.filtered_tweets = filtered.size();

  OnlineState state;
  for (const auto& raw : filtered) {
    auto tweet = std::make_shared<const ProcessedTweet>(process_tweet(raw, cfg, plugs));
    try {
      result.assignment_log.push_back(cluster_step(state, std::move(tweet), ccfg));
    } catch (const ValidationError& e) {
      throw StageError("clustering", raw.id, e.what());
    }
    result.expired_clusters += expire_clusters(state, raw.time, ccfg).removed.size();
  }
  result.expired_clusters += flush_clusters(state, ccfg).size();

  MergeResult merged = auto_merge(state.finalized, ccfg);
  result.merge_log = std::move(merged.log);
  result.merge_candidates = std::move(merged.candidates);
  for (const auto& c : merged.clusters) {
    if (auto kept = filter_informative(dedupe_cluster(c, ccfg), classifier, ccfg)) {
      result.clusters.push_back(std::move(*kept));
    }
  }
  // Candidates whose cluster vanished in post-processing are dropped.
  std::set<std::string> alive;
  for (const auto& c : result.clusters) alive.insert(c.id);
  std::erase_if(result.merge_candidates, [&](const MergeCandidate& m) {
    return !alive.count(m.cluster_a) || !alive.count(m.cluster_b);
  });
  return result;
}

json to_json(const EntityMention& m) {
  return {{"surface", m.surface},
          {"kind", std::string(to_string(m.kind))},
          {"span", {m.span.begin, m.span.end}}};
}

EntityMention entity_mention_from_json(const json& j) {
  EntityMention m;
  m.surface = j.at("surface").get<std::string>();
  m.kind = parse_entity_kind(j.at("kind").get<std::string>());
  m.span = {j.at("span").at(0).get<std::size_t>(), j.at("span").at(1).get<std::size_t>()};
  return m;
}

json to_json(const ProcessedTweet& t) {
  json j = tweet_to_json(t.raw);
  json ents = json::array();
  for (const auto& e : t.entities) ents.push_back(to_json(e));
  json res = json::array();
  for (const auto& r : t.resolved) res.push_back(resolved_to_json(r));
  j["entities"] = ents;
  j["resolved"] = res;
  j["hashtags"] = t.hashtags;
  return j;
}

ProcessedTweet processed_tweet_from_json(const json& j) {
  ProcessedTweet t;
  t.raw = tweet_from_json(j);
  t.hashtags = t.raw.hashtags;
  for (const auto& e : j.value("entities", json::array())) {
    t.entities.push_back(entity_mention_from_json(e));
  }
  for (const auto& r : j.value("resolved", json::array())) {
    t.resolved.push_back(resolved_from_json(r));
  }
  return t;
}

json to_json(const AssignmentRecord& r) {
  return {{"tweet_id", r.tweet_id},
          {"cluster_id", r.cluster_id},
          {"similarity", r.similarity},
          {"action", r.action == AssignAction::kJoin ? "join" : "create"}};
}

json to_json(const MergeCandidate& c) {
  json j = {{"cluster_a", c.cluster_a},
            {"cluster_b", c.cluster_b},
            {"head_similarity", c.head_similarity},
            {"decision", std::string(to_string(c.decision))}};
  j["decided_by"] = c.decided_by ? json(*c.decided_by) : json(nullptr);
  return j;
}

MergeCandidate merge_candidate_from_json(const json& j) {
  if (!j.is_object()) throw DataError("merge candidate must be an object");
  MergeCandidate c;
  try {
    c.cluster_a = j.at("cluster_a").get<std::string>();
    c.cluster_b = j.at("cluster_b").get<std::string>();
    c.head_similarity = j.value("head_similarity", 0.0);
    c.decision = parse_merge_decision(j.value("decision", "pending"));
    if (auto it = j.find("decided_by"); it != j.end() && it->is_string()) {
      c.decided_by = it->get<std::string>();
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("merge candidate: ") + e.what());
  } catch (const ValidationError& e) {
    throw DataError(std::string("merge candidate: ") + e.what());
  }
  return c;
}

json to_json(const MergeLogEntry& e) {
  return {{"cluster_a", e.cluster_a},
          {"cluster_b", e.cluster_b},
          {"similarity", e.similarity},
          {"source", e.source}};
}

json cluster_run_to_json(const ClusterRun& run) {
  json clusters = json::array();
  json tweets = json::array();
  std::vector<TweetPtr> all;
  for (const auto& c : run.clusters) {
    clusters.push_back(cluster_to_json(c));
    all.insert(all.end(), c.members.begin(), c.members.end());
  }
  std::sort(all.begin(), all.end(), [](const TweetPtr& a, const TweetPtr& b) {
    return std::tie(a->raw.time, a->raw.id) < std::tie(b->raw.time, b->raw.id);
  });
  for (const auto& t : all) tweets.push_back(to_json(*t));
  json log = json::array();
  for (const auto& r : run.assignment_log) log.push_back(to_json(r));
  json merges = json::array();
  for (const auto& m : run.merge_log) merges.push_back(to_json(m));
  return {{"config", to_json(run.config)},
          {"clusters", clusters},
          {"assignment_log", log},
          {"merge_log", merges},
          {"tweets", tweets}};
}

ClusterRun cluster_run_from_json(const json& j) {
  if (!j.is_object()) throw DataError("cluster run must be a JSON object");
  ClusterRun run;
  try {
    run.config = clustering_config_from_json(j.value("config", json::object()));
    std::map<std::string, TweetPtr> tweets;
    for (const auto& t : j.value("tweets", json::array())) {
      auto p = std::make_shared<const ProcessedTweet>(processed_tweet_from_json(t));
      tweets[p->id()] = p;
    }
    for (const auto& cj : j.at("clusters")) {
      Cluster c;
      c.id = cj.at("id").get<std::string>();
      c.domain = parse_domain(cj.value("domain", std::string(to_string(run.config.domain))));
      c.state = parse_cluster_state(cj.value("state", "finalized"));
      for (const auto& mid : cj.at("members")) {
        auto it = tweets.find(mid.get<std::string>());
        if (it == tweets.end()) {
          throw DataError("cluster " + c.id + ": unknown member '" + mid.get<std::string>() + "'");
        }
        c.members.push_back(it->second);
      }
      if (c.members.empty()) throw DataError("cluster " + c.id + " has no members");
      c.normalize();
      run.clusters.push_back(std::move(c));
    }
    for (const auto& r : j.value("assignment_log", json::array())) {
      AssignmentRecord rec;
      rec.tweet_id = r.at("tweet_id").get<std::string>();
      rec.cluster_id = r.at("cluster_id").get<std::string>();
      rec.similarity = r.value("similarity", 0.0);
      rec.action = r.value("action", "create") == "join" ? AssignAction::kJoin
                                                          : AssignAction::kCreate;
      run.assignment_log.push_back(std::move(rec));
    }
    for (const auto& m : j.value("merge_log", json::array())) {
      run.merge_log.push_back({m.at("cluster_a").get<std::string>(),
                               m.at("cluster_b").get<std::string>(),
                               m.value("similarity", 0.0), m.value("source", "auto")});
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("cluster run: ") + e.what());
  } catch (const ValidationError& e) {
    throw DataError(std::string("cluster run: ") + e.what());
  }
  return run;
}

ClusterRun load_cluster_run(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return cluster_run_from_json(j);
}

void save_cluster_run(const std::filesystem::path& path, const ClusterRun& run) {
  write_file(path, dump_json(cluster_run_to_json(run)));
}

json merge_queue_to_json(std::span<const MergeCandidate> queue) {
  json out = json::array();
  for (const auto& c : queue) out.push_back(to_json(c));
  return out;
}

std::vector<MergeCandidate> merge_queue_from_json(const json& j) {
  if (!j.is_array()) throw DataError("merge queue must be a JSON array");
  std::vector<MergeCandidate> out;
  for (const auto& c : j) out.push_back(merge_candidate_from_json(c));
  return out;
}

std::vector<MergeCandidate> load_merge_queue(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return merge_queue_from_json(j);
}

void save_merge_queue(const std::filesystem::path& path, std::span<const MergeCandidate> queue) {
  write_file(path, dump_json(merge_queue_to_json(queue)));
}

ClusterRun apply_merge_decisions(const ClusterRun& run,
                                 std::span<const MergeCandidate> decisions) {
  ClusterRun out = run;
  std::vector<ClusterPair> pairs;
  for (const auto& d : decisions) {
    if (d.decision != MergeDecision::kMerged) continue;
    pairs.push_back(make_pair_key(d.cluster_a, d.cluster_b));
    out.merge_log.push_back({d.cluster_a, d.cluster_b, d.head_similarity, "human"});
  }
  out.clusters = unite_clusters(run.clusters, pairs);
  return out;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

}  // namespace crisistl
