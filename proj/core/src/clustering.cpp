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

#include "crisistl/clustering.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <tuple>

#include "crisistl/error.hpp"
#include "crisistl/text.hpp"

namespace crisistl {
namespace {

bool time_order(const TweetPtr& a, const TweetPtr& b) {
  return std::tie(a->raw.time, a->raw.id) < std::tie(b->raw.time, b->raw.id);
}

// Strict ordering used to put similarity arguments in canonical order.
bool canonical_less(const ProcessedTweet& a, const ProcessedTweet& b) {
  if (a.id() != b.id()) return a.id() < b.id();
  auto surfaces = [](const ProcessedTweet& t) {
    std::vector<std::string> s;
    for (const auto& e : t.entities) s.push_back(e.surface);
    return s;
  };
  return surfaces(a) < surfaces(b);
}

bool intersects(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  for (const auto& x : a) {
    if (std::find(b.begin(), b.end(), x) != b.end()) return true;
  }
  return false;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  // Keeps the smaller index as root.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

std::vector<std::size_t> id_order(std::span<const Cluster> clusters) {
  std::vector<std::size_t> order(clusters.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return clusters[a].id < clusters[b].id; });
  return order;
}

}  // namespace

ClusteringConfig ClusteringConfig::defaults_for(Domain domain) {
  ClusteringConfig cfg;
  cfg.domain = domain;
  switch (domain) {
    case Domain::kTraffic:
      cfg.time_threshold = std::chrono::hours{3};
      cfg.max_dist_km = 4.0;
      break;
    case Domain::kFire:
    case Domain::kOther:
      cfg.max_dist_km = 4.0;
      break;
    case Domain::kWildfire:
    case Domain::kStorm:
      cfg.max_dist_km = 10.0;
      break;
  }
  return cfg;
}

void ClusteringConfig::validate() const {
  auto nonneg = [](double v, const char* field) {
    if (!(v >= 0.0)) throw ValidationError("must be >= 0", field);
  };
  nonneg(s_hashtag, "s_hashtag");
  nonneg(s_dist, "s_dist");
  nonneg(min_dist_km, "min_dist_km");
  nonneg(sim_threshold, "sim_threshold");
  nonneg(s_head, "s_head");
  nonneg(s_head_min, "s_head_min");
  if (!(min_dist_km < max_dist_km)) {
    throw ValidationError("must be greater than min_dist_km", "max_dist_km");
  }
  if (max_pairs == 0) throw ValidationError("must be >= 1", "max_pairs");
  if (!(s_head_min <= s_head)) throw ValidationError("must not exceed s_head", "s_head_min");
  if (!(d_match >= 0.0 && d_match <= 1.0)) throw ValidationError("must be in [0, 1]", "d_match");
  if (time_threshold.count() < 0) throw ValidationError("must be >= 0", "time_threshold");
  if (expiration_threshold.count() < 0) {
    throw ValidationError("must be >= 0", "expiration_threshold");
  }
}

std::vector<EntityPair> find_matching_entities(std::span<const EntityMention> a,
                                               std::span<const EntityMention> b,
                                               std::size_t max_pairs) {
  std::vector<EntityPair> cross;
  cross.reserve(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      double s = entity_similarity(a[i], b[j]);
      if (s > 0.0) cross.push_back({i, j, s});
    }
  }
  std::stable_sort(cross.begin(), cross.end(), [&](const EntityPair& x, const EntityPair& y) {
    if (x.score != y.score) return x.score > y.score;
    if (a[x.left].surface != a[y.left].surface) return a[x.left].surface < a[y.left].surface;
    return b[x.right].surface < b[y.right].surface;
  });
  std::vector<bool> used_a(a.size()), used_b(b.size());
  std::vector<EntityPair> out;
  for (const auto& p : cross) {
    if (out.size() >= max_pairs) break;
    if (used_a[p.left] || used_b[p.right]) continue;
    used_a[p.left] = used_b[p.right] = true;
    out.push_back(p);
  }
  return out;
}

std::vector<EntityPair> find_matching_entities(const ProcessedTweet& a, const ProcessedTweet& b,
                                               std::size_t max_pairs) {
  return find_matching_entities(std::span<const EntityMention>(a.entities),
                                std::span<const EntityMention>(b.entities), max_pairs);
}

double tweet_similarity(const ProcessedTweet& a, const ProcessedTweet& b,
                        const ClusteringConfig& cfg) {
  const ProcessedTweet& t1 = canonical_less(b, a) ? b : a;
  const ProcessedTweet& t2 = &t1 == &a ? b : a;
  double score = 0.0;
  if (intersects(t1.hashtags, t2.hashtags)) score += cfg.s_hashtag;
  if (auto d = smallest_distance(t1.resolved, t2.resolved)) {
    if (*d >= cfg.max_dist_km) return 0.0;
    if (*d <= cfg.min_dist_km) score += cfg.s_dist;
  }
  std::size_t norm = std::min({t1.entities.size(), t2.entities.size(), cfg.max_pairs});
  if (norm > 0) {
    double total = 0.0;
    for (const auto& p : find_matching_entities(t1, t2, cfg.max_pairs)) total += p.score;
    score += total / static_cast<double>(norm);
  }
  return score;
}

std::string_view to_string(ClusterState s) {
  switch (s) {
    case ClusterState::kActive: return "active";
    case ClusterState::kExpired: return "expired";
    case ClusterState::kFinalized: return "finalized";
  }
  return "active";
}

ClusterState parse_cluster_state(std::string_view name) {
  if (name == "active") return ClusterState::kActive;
  if (name == "expired") return ClusterState::kExpired;
  if (name == "finalized") return ClusterState::kFinalized;
  throw ValidationError("unknown cluster state '" + std::string(name) + "'", "state");
}

std::size_t select_head(std::span<const TweetPtr> members) {
  std::size_t head = 0;
  for (std::size_t i = 1; i < members.size(); ++i) {
    if (members[i]->entities.size() >= members[head]->entities.size()) head = i;
  }
  return head;
}

void Cluster::normalize() {
  std::sort(members.begin(), members.end(), time_order);
  head = select_head(members);
  if (!members.empty()) last_update = members.back()->time();
}

std::string cluster_id(std::size_t counter) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "c%06zu", counter);
  return buf;
}

AssignmentRecord cluster_step(OnlineState& state, TweetPtr tweet, const ClusteringConfig& cfg) {
  if (!tweet) throw ValidationError("null tweet", "tweet");
  if (state.last_time && tweet->time() < *state.last_time) {
    throw ValidationError("tweet " + tweet->id() + " is earlier than a processed tweet", "time");
  }
  state.last_time = tweet->time();

  Cluster* best = nullptr;
  double best_sim = -1.0;
  double best_seen = 0.0;
  for (auto& c : state.active) {
    double s = tweet_similarity(*tweet, c.head_tweet(), cfg);
    best_seen = std::max(best_seen, s);
    if (!(s > cfg.sim_threshold)) continue;
    if (!(tweet->time() - c.last_update < cfg.time_threshold)) continue;
    // Active clusters are visited in id order, so ">" keeps the smaller id.
    bool better = best == nullptr || s > best_sim ||
                  (s == best_sim && c.last_update > best->last_update);
    if (better) {
      best = &c;
      best_sim = s;
    }
  }

  AssignmentRecord rec;
  rec.tweet_id = tweet->id();
  if (best) {
    best->members.push_back(std::move(tweet));
    best->normalize();
    rec.cluster_id = best->id;
    rec.similarity = best_sim;
    rec.action = AssignAction::kJoin;
    return rec;
  }
  Cluster c;
  c.id = cluster_id(++state.created);
  c.domain = cfg.domain;
  c.members.push_back(std::move(tweet));
  c.normalize();
  rec.cluster_id = c.id;
  rec.similarity = best_seen;
  rec.action = AssignAction::kCreate;
  state.active.push_back(std::move(c));
  return rec;
}

ExpireResult expire_clusters(OnlineState& state, Timestamp now, const ClusteringConfig& cfg) {
  ExpireResult result;
  std::vector<Cluster> keep;
  for (auto& c : state.active) {
    if (now - c.last_update < cfg.expiration_threshold) {
      keep.push_back(std::move(c));
    } else if (c.size() < cfg.tweet_threshold) {
      c.state = ClusterState::kExpired;
      result.removed.push_back(std::move(c));
    } else {
      c.state = ClusterState::kFinalized;
      result.finalized_ids.push_back(c.id);
      state.finalized.push_back(std::move(c));
    }
  }
  state.active = std::move(keep);
  return result;
}

std::vector<Cluster> flush_clusters(OnlineState& state, const ClusteringConfig& cfg) {
  std::vector<Cluster> removed;
  for (auto& c : state.active) {
    if (c.size() < cfg.tweet_threshold) {
      c.state = ClusterState::kExpired;
      removed.push_back(std::move(c));
    } else {
      c.state = ClusterState::kFinalized;
      state.finalized.push_back(std::move(c));
    }
  }
  state.active.clear();
  std::sort(state.finalized.begin(), state.finalized.end(),
            [](const Cluster& a, const Cluster& b) { return a.id < b.id; });
  return removed;
}

std::string_view to_string(MergeDecision d) {
  switch (d) {
    case MergeDecision::kPending: return "pending";
    case MergeDecision::kMerged: return "merged";
    case MergeDecision::kRejected: return "rejected";
  }
  return "pending";
}

MergeDecision parse_merge_decision(std::string_view name) {
  if (name == "pending") return MergeDecision::kPending;
  if (name == "merged" || name == "merge") return MergeDecision::kMerged;
  if (name == "rejected" || name == "reject") return MergeDecision::kRejected;
  throw ValidationError("unknown merge decision '" + std::string(name) + "'", "decision");
}

ClusterPair make_pair_key(std::string a, std::string b) {
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b)};
}

std::vector<Cluster> unite_clusters(std::span<const Cluster> clusters,
                                    std::span<const ClusterPair> pairs) {
  // Index positions follow id order so the root is the smallest id.
  auto order = id_order(clusters);
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < order.size(); ++i) pos[clusters[order[i]].id] = i;
  UnionFind uf(order.size());
  for (const auto& [a, b] : pairs) {
    auto ia = pos.find(a);
    auto ib = pos.find(b);
    if (ia == pos.end()) throw NotFoundError("unknown cluster '" + a + "'");
    if (ib == pos.end()) throw NotFoundError("unknown cluster '" + b + "'");
    uf.unite(ia->second, ib->second);
  }
  std::vector<Cluster> out;
  std::map<std::size_t, std::size_t> root_slot;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Cluster& c = clusters[order[i]];
    std::size_t r = uf.find(i);
    auto it = root_slot.find(r);
    if (it == root_slot.end()) {
      root_slot[r] = out.size();
      out.push_back(c);
    } else {
      auto& dst = out[it->second].members;
      dst.insert(dst.end(), c.members.begin(), c.members.end());
    }
  }
  for (auto& c : out) c.normalize();
  return out;
}

std::vector<MergeCandidate> merge_candidates(std::span<const Cluster> clusters,
                                             const ClusteringConfig& cfg,
                                             const std::set<ClusterPair>& suppressed) {
  auto order = id_order(clusters);
  std::vector<MergeCandidate> out;
  for (std::size_t x = 0; x < order.size(); ++x) {
    for (std::size_t y = x + 1; y < order.size(); ++y) {
      const Cluster& a = clusters[order[x]];
      const Cluster& b = clusters[order[y]];
      double s = tweet_similarity(a.head_tweet(), b.head_tweet(), cfg);
      if (!(s > cfg.s_head_min) || s > cfg.s_head) continue;
      if (suppressed.count(make_pair_key(a.id, b.id))) continue;
      out.push_back({a.id, b.id, s, MergeDecision::kPending, std::nullopt});
    }
  }
  return out;
}

MergeResult auto_merge(std::span<const Cluster> clusters, const ClusteringConfig& cfg,
                       const std::set<ClusterPair>& suppressed) {
  MergeResult result;
  auto order = id_order(clusters);
  std::vector<ClusterPair> pairs;
  std::vector<MergeCandidate> borderline;
  for (std::size_t x = 0; x < order.size(); ++x) {
    for (std::size_t y = x + 1; y < order.size(); ++y) {
      const Cluster& a = clusters[order[x]];
      const Cluster& b = clusters[order[y]];
      double s = tweet_similarity(a.head_tweet(), b.head_tweet(), cfg);
      if (s > cfg.s_head) {
        pairs.emplace_back(a.id, b.id);
        result.log.push_back({a.id, b.id, s, "auto"});
      } else if (s > cfg.s_head_min) {
        borderline.push_back({a.id, b.id, s, MergeDecision::kPending, std::nullopt});
      }
    }
  }
  result.clusters = unite_clusters(clusters, pairs);

  // Borderline pairs refer to the surviving (root) ids; pairs that collapsed
  // into one cluster vanish and duplicates keep the highest similarity.
  std::map<std::string, std::string> root_of;
  for (const auto& c : result.clusters) {
    for (const auto& m : c.members) root_of[m->id()] = c.id;
  }
  auto root = [&](const std::string& id) {
    auto it = std::find_if(clusters.begin(), clusters.end(),
                           [&](const Cluster& c) { return c.id == id; });
    return root_of.at(it->members.front()->id());
  };
  std::map<ClusterPair, MergeCandidate> by_pair;
  for (auto& cand : borderline) {
    ClusterPair key = make_pair_key(root(cand.cluster_a), root(cand.cluster_b));
    if (key.first == key.second || suppressed.count(key)) continue;
    cand.cluster_a = key.first;
    cand.cluster_b = key.second;
    auto it = by_pair.find(key);
    if (it == by_pair.end() || cand.head_similarity > it->second.head_similarity) {
      by_pair[key] = cand;
    }
  }
  for (auto& [key, cand] : by_pair) result.candidates.push_back(std::move(cand));
  return result;
}

Cluster dedupe_cluster(const Cluster& cluster, const ClusteringConfig& cfg) {
  Cluster out = cluster;
  out.members.clear();
  std::vector<std::string> kept_text;
  for (const auto& m : cluster.members) {
    std::string text = normalized_joined(m->raw.text);
    bool duplicate = false;
    if (!out.members.empty()) {
      for (const auto& k : kept_text) {
        if (match_ratio(text, k) > cfg.d_match) {
          duplicate = true;
          break;
        }
      }
    }
    if (duplicate) continue;
    out.members.push_back(m);
    kept_text.push_back(std::move(text));
  }
  out.normalize();
  return out;
}

const std::vector<std::string>& LexiconInformativeness::default_cues() {
  static const std::vector<std::string> cues = {
      "pray",          "prayer",        "thoughts and prayers", "god bless",
      "bless",         "donate",        "donation",             "fundraiser",
      "gofundme",      "text to donate", "please help",         "heartbroken",
      "heartbreaking", "my heart",      "so sad",               "sad",
      "condolence",    "rip",           "sending love",         "thoughts are with",
      "stay safe",     "i hope",        "i feel",               "omg",
  };
  return cues;
}

LexiconInformativeness::LexiconInformativeness()
    : LexiconInformativeness(default_cues()) {}

LexiconInformativeness::LexiconInformativeness(std::vector<std::string> cue_phrases) {
  for (const auto& phrase : cue_phrases) {
    std::vector<std::string> stems;
    for (const auto& tok : tokenize(phrase)) stems.push_back(stem(tok));
    if (!stems.empty()) cues_.push_back(std::move(stems));
  }
}

bool LexiconInformativeness::informative(const ProcessedTweet& tweet) const {
  std::vector<std::string> stems;
  for (const auto& tok : tokenize(tweet.raw.text)) stems.push_back(stem(tok));
  for (const auto& cue : cues_) {
    if (cue.size() > stems.size()) continue;
    for (std::size_t i = 0; i + cue.size() <= stems.size(); ++i) {
      if (std::equal(cue.begin(), cue.end(), stems.begin() + static_cast<std::ptrdiff_t>(i))) {
        return false;
      }
    }
  }
  return true;
}

std::optional<Cluster> filter_informative(const Cluster& cluster,
                                          const InformativenessClassifier& classifier,
                                          const ClusteringConfig& cfg) {
  if (!cfg.informative_domains.count(cluster.domain)) return cluster;
  Cluster out = cluster;
  out.members.clear();
  for (const auto& m : cluster.members) {
    bool keep = false;
    try {
      keep = classifier.informative(*m);
    } catch (const std::exception& e) {
      throw StageError("informativeness", m->id(), "cluster " + cluster.id + ": " + e.what());
    }
    if (keep) out.members.push_back(m);
  }
  if (out.members.empty()) return std::nullopt;
  out.normalize();
  return out;
}

}  // namespace crisistl
