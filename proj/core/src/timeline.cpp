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

#include "crisistl/timeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "crisistl/config.hpp"
#include "crisistl/error.hpp"
#include "crisistl/text.hpp"

namespace crisistl {

using nlohmann::json;

namespace {

constexpr Domain kDomainOrder[] = {Domain::kWildfire, Domain::kTraffic, Domain::kFire,
                                   Domain::kStorm, Domain::kOther};

json parse_json_file(const std::filesystem::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

TweetLabel label_from_json(const json& j, const std::string& field) {
  TweetLabel l;
  if (j.is_boolean()) {
    l.in_timeline = j.get<bool>();
    return l;
  }
  if (!j.is_object() || !j.contains("in_timeline") || !j["in_timeline"].is_boolean()) {
    throw ValidationError("label must be a boolean or {\"in_timeline\": bool}", field);
  }
  l.in_timeline = j["in_timeline"].get<bool>();
  if (auto it = j.find("reason"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw ValidationError("must be a string", field + ".reason");
    l.reason = parse_exclusion_reason(it->get<std::string>());
  }
  return l;
}

json label_to_json(const TweetLabel& l) {
  json j = {{"in_timeline", l.in_timeline}};
  if (l.reason) j["reason"] = std::string(to_string(*l.reason));
  return j;
}

std::string format_fraction(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

// Mapping helpers.

const json* at_path(const json& j, const std::string& path) {
  const json* cur = &j;
  std::size_t pos = 0;
  while (pos <= path.size()) {
    std::size_t dot = path.find('.', pos);
    std::string key = path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (!cur->is_object()) return nullptr;
    auto it = cur->find(key);
    if (it == cur->end()) return nullptr;
    cur = &*it;
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  return cur;
}

std::string scalar_string(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  if (j.is_number()) return j.dump();
  if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
  throw DataError("expected a scalar, got " + std::string(j.type_name()));
}

}  // namespace

std::string_view to_string(ExclusionReason r) {
  switch (r) {
    case ExclusionReason::kIrrelevant: return "irrelevant";
    case ExclusionReason::kUninformative: return "uninformative";
    case ExclusionReason::kRepetitive: return "repetitive";
  }
  return "irrelevant";
}

ExclusionReason parse_exclusion_reason(std::string_view name) {
  std::string n = ascii_lower(trim(name));
  if (n == "irrelevant") return ExclusionReason::kIrrelevant;
  if (n == "uninformative") return ExclusionReason::kUninformative;
  if (n == "repetitive") return ExclusionReason::kRepetitive;
  throw ValidationError("unknown exclusion reason '" + std::string(name) + "'", "reason");
}

bool GoldTimeline::in_timeline(std::size_t index) const {
  if (index == 0) return true;
  return gold_labels.at(timeline.tweets.at(index).id);
}

std::vector<const TimelineTweet*> GoldTimeline::members() const {
  std::vector<const TimelineTweet*> out;
  for (std::size_t i = 0; i < timeline.tweets.size(); ++i) {
    if (in_timeline(i)) out.push_back(&timeline.tweets[i]);
  }
  return out;
}

void validate_annotation(const AnnotationSet& a, const Timeline& t) {
  if (trim(a.annotator).empty()) throw ValidationError("must not be empty", "annotator");
  std::set<std::string> non_seed;
  for (std::size_t i = 1; i < t.tweets.size(); ++i) non_seed.insert(t.tweets[i].id);
  for (const auto& [id, label] : a.labels) {
    if (!non_seed.count(id)) {
      throw ValidationError("not a non-seed tweet of timeline " + t.id, "labels." + id);
    }
  }
  for (std::size_t i = 1; i < t.tweets.size(); ++i) {
    const std::string& id = t.tweets[i].id;
    auto it = a.labels.find(id);
    if (it == a.labels.end()) throw ValidationError("missing label", "labels." + id);
    const TweetLabel& l = it->second;
    if (!l.in_timeline && !l.reason) {
      throw ValidationError("excluded tweet needs a reason", "labels." + id + ".reason");
    }
    if (l.in_timeline && l.reason) {
      throw ValidationError("reason given for an included tweet", "labels." + id + ".reason");
    }
  }
  if (trim(a.summary).empty()) throw ValidationError("must not be empty", "summary");
}

void validate(const Timeline& t) {
  if (t.id.empty()) throw ValidationError("must not be empty", "id");
  if (t.tweets.empty()) throw ValidationError("timeline needs at least one tweet", "tweets");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < t.tweets.size(); ++i) {
    const auto& tw = t.tweets[i];
    if (tw.id.empty()) throw ValidationError("tweet id must not be empty", "tweets");
    if (!ids.insert(tw.id).second) throw ValidationError("duplicate tweet id " + tw.id, "tweets");
    if (i > 0 && tw.time && t.tweets[i - 1].time && *tw.time < *t.tweets[i - 1].time) {
      throw ValidationError("tweets out of chronological order at " + tw.id, "tweets");
    }
  }
  std::set<std::string> annotators;
  for (const auto& a : t.annotations) {
    validate_annotation(a, t);
    if (!annotators.insert(a.annotator).second) {
      throw ValidationError("duplicate annotator " + a.annotator, "annotator");
    }
  }
}

double pairwise_agreement(const AnnotationSet& a, const AnnotationSet& b, const Timeline& t) {
  if (t.tweets.size() <= 1) return 1.0;
  std::size_t same = 0;
  for (std::size_t i = 1; i < t.tweets.size(); ++i) {
    const std::string& id = t.tweets[i].id;
    auto ia = a.labels.find(id);
    auto ib = b.labels.find(id);
    if (ia == a.labels.end() || ib == b.labels.end()) {
      throw ValidationError("label sets differ on tweet " + id + " of timeline " + t.id, "labels");
    }
    if (ia->second.in_timeline == ib->second.in_timeline) ++same;
  }
  return static_cast<double>(same) / static_cast<double>(t.tweets.size() - 1);
}

BestPair best_annotator_pair(const Timeline& t) {
  if (t.annotations.size() < 2) {
    throw ValidationError("timeline " + t.id + " needs at least two annotation sets",
                          "annotations");
  }
  std::optional<BestPair> best;
  std::pair<std::string, std::string> best_key;
  for (std::size_t i = 0; i < t.annotations.size(); ++i) {
    for (std::size_t j = i + 1; j < t.annotations.size(); ++j) {
      double agr = pairwise_agreement(t.annotations[i], t.annotations[j], t);
      std::size_t lo = i, hi = j;
      if (t.annotations[hi].annotator < t.annotations[lo].annotator) std::swap(lo, hi);
      std::pair<std::string, std::string> key{t.annotations[lo].annotator,
                                              t.annotations[hi].annotator};
      if (!best || agr > best->agreement || (agr == best->agreement && key < best_key)) {
        best = BestPair{lo, hi, agr};
        best_key = key;
      }
    }
  }
  return *best;
}

GoldTimeline aggregate_majority(const Timeline& t) {
  if (t.annotations.size() != 3) {
    throw ValidationError("timeline " + t.id + " has " + std::to_string(t.annotations.size()) +
                              " annotation sets, expected 3",
                          "annotations");
  }
  if (t.tweets.empty()) throw ValidationError("timeline needs at least one tweet", "tweets");
  GoldTimeline g;
  g.timeline = t;
  BestPair pair = best_annotator_pair(t);
  for (std::size_t i = 1; i < t.tweets.size(); ++i) {
    const std::string& id = t.tweets[i].id;
    int votes = 0;
    for (const auto& a : t.annotations) votes += a.labels.at(id).in_timeline ? 1 : 0;
    g.gold_labels[id] = votes >= 2;
  }
  const auto& a = t.annotations[pair.first];
  const auto& b = t.annotations[pair.second];
  g.reference_summaries = {a.summary, b.summary};
  g.reference_annotators = {a.annotator, b.annotator};
  return g;
}

double corpus_agreement(std::span<const Timeline> timelines) {
  if (timelines.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& t : timelines) sum += best_annotator_pair(t).agreement;
  return sum / static_cast<double>(timelines.size());
}

std::optional<ExpertAgreement> expert_agreement(std::span<const GoldTimeline> golds) {
  ExpertAgreement out;
  double sum = 0.0;
  for (const auto& g : golds) {
    if (!g.timeline.expert_labels) continue;
    std::size_t total = 0, same = 0;
    for (const auto& [id, gold] : g.gold_labels) {
      auto it = g.timeline.expert_labels->find(id);
      if (it == g.timeline.expert_labels->end()) continue;
      ++total;
      if (it->second == gold) ++same;
    }
    sum += total == 0 ? 1.0 : static_cast<double>(same) / static_cast<double>(total);
    ++out.timelines;
  }
  if (out.timelines == 0) return std::nullopt;
  out.agreement = sum / static_cast<double>(out.timelines);
  return out;
}

std::size_t length_bucket(std::size_t length) {
  if (length <= 5) return 0;
  if (length <= 12) return 1;
  if (length <= 25) return 2;
  return 3;
}

std::string_view bucket_label(std::size_t bucket) {
  static constexpr std::string_view labels[] = {"1_5", "6_12", "13_25", "26_plus"};
  return labels[std::min(bucket, kBucketCount - 1)];
}

DatasetStats dataset_stats(std::span<const GoldTimeline> golds, const StatsOptions& opt) {
  DatasetStats stats;
  for (Domain d : kDomainOrder) stats.domains[d] = {};
  std::map<Domain, std::array<std::pair<double, std::size_t>, kBucketCount>> frac;
  std::array<std::pair<double, std::size_t>, kBucketCount> total_frac{};

  for (const auto& g : golds) {
    const Timeline& t = g.timeline;
    std::size_t in = 0, out = 0;
    for (const auto& [id, label] : g.gold_labels) (label ? in : out)++;
    if (opt.count_seed && !t.tweets.empty()) ++in;
    std::size_t length = opt.length_mode == LengthMode::kAllTweets ? t.tweets.size()
                                                                   : g.members().size();
    std::size_t bucket = length_bucket(length);
    for (DomainStats* s : {&stats.domains[t.domain], &stats.total}) {
      s->timelines += 1;
      s->tweets += in + out;
      s->in += in;
      s->out += out;
      s->buckets[bucket] += 1;
    }
    if (in + out > 0) {
      double f = static_cast<double>(in) / static_cast<double>(in + out);
      auto& df = frac[t.domain][bucket];
      df.first += f;
      df.second += 1;
      total_frac[bucket].first += f;
      total_frac[bucket].second += 1;
    }
  }
  auto finish = [](DomainStats& s, const std::array<std::pair<double, std::size_t>, 4>& f) {
    for (std::size_t b = 0; b < kBucketCount; ++b) {
      if (f[b].second > 0) s.in_fraction[b] = f[b].first / static_cast<double>(f[b].second);
    }
  };
  for (auto& [d, s] : stats.domains) finish(s, frac[d]);
  finish(stats.total, total_frac);
  return stats;
}

std::string stats_csv(const DatasetStats& stats) {
  std::ostringstream os;
  os << "domain,timelines,tweets,in,out";
  for (std::size_t b = 0; b < kBucketCount; ++b) os << ",len_" << bucket_label(b);
  for (std::size_t b = 0; b < kBucketCount; ++b) os << ",in_frac_" << bucket_label(b);
  os << "\n";
  auto row = [&](std::string_view name, const DomainStats& s) {
    os << name << ',' << s.timelines << ',' << s.tweets << ',' << s.in << ',' << s.out;
    for (auto c : s.buckets) os << ',' << c;
    for (const auto& f : s.in_fraction) os << ',' << format_fraction(f);
    os << "\n";
  };
  for (Domain d : kDomainOrder) {
    auto it = stats.domains.find(d);
    row(to_string(d), it == stats.domains.end() ? DomainStats{} : it->second);
  }
  row("total", stats.total);
  return os.str();
}

const std::vector<std::string>& Splits::by_name(std::string_view name) const {
  if (name == "train") return train;
  if (name == "dev") return dev;
  if (name == "test") return test;
  throw ValidationError("unknown split '" + std::string(name) + "'", "split");
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw ValidationError("bound must be positive", "bound");
  // 2^64 mod bound; values below it would bias the modulo.
  std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

Splits stratified_split(std::span<const GoldTimeline> golds, std::array<double, 3> fractions,
                        std::uint64_t seed) {
  double sum = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0)) throw ValidationError("fractions must be >= 0", "fractions");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-6) throw ValidationError("fractions must sum to 1", "fractions");

  std::map<std::pair<Domain, std::size_t>, std::vector<std::string>> strata;
  std::set<std::string> seen;
  for (const auto& g : golds) {
    if (!seen.insert(g.id()).second) throw ValidationError("duplicate timeline " + g.id(), "id");
    strata[{g.timeline.domain, length_bucket(g.timeline.tweets.size())}].push_back(g.id());
  }
  std::mt19937_64 rng(seed);
  Splits out;
  std::vector<std::string>* lists[] = {&out.train, &out.dev, &out.test};
  for (auto& [key, ids] : strata) {
    std::sort(ids.begin(), ids.end());
    for (std::size_t i = ids.size(); i > 1; --i) {
      std::swap(ids[i - 1], ids[uniform_below(rng, i)]);
    }
    const double n = static_cast<double>(ids.size());
    std::array<std::size_t, 3> count{};
    std::array<double, 3> rem{};
    std::size_t assigned = 0;
    for (int k = 0; k < 3; ++k) {
      double q = n * fractions[k];
      double fl = std::floor(q + 1e-9);
      count[k] = static_cast<std::size_t>(fl);
      rem[k] = q - fl;
      assigned += count[k];
    }
    std::array<int, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rem[a] > rem[b]; });
    for (std::size_t r = 0; assigned < ids.size(); ++r, ++assigned) count[order[r % 3]] += 1;
    std::size_t pos = 0;
    for (int k = 0; k < 3; ++k) {
      for (std::size_t c = 0; c < count[k]; ++c) lists[k]->push_back(ids[pos++]);
    }
  }
  for (auto* l : lists) std::sort(l->begin(), l->end());
  return out;
}

json to_json(const Splits& s) { return {{"train", s.train}, {"dev", s.dev}, {"test", s.test}}; }

Splits splits_from_json(const json& j) {
  if (!j.is_object()) throw DataError("splits must be a JSON object");
  Splits s;
  auto read = [&](const char* name, std::vector<std::string>& dst) {
    auto it = j.find(name);
    if (it == j.end() || !it->is_array()) throw DataError(std::string("splits: missing ") + name);
    for (const auto& v : *it) dst.push_back(scalar_string(v));
  };
  read("train", s.train);
  read("dev", s.dev);
  read("test", s.test);
  return s;
}

Splits load_splits(const std::filesystem::path& path) {
  return splits_from_json(parse_json_file(path));
}

void save_splits(const std::filesystem::path& path, const Splits& s) {
  write_file(path, to_json(s).dump(2) + "\n");
}

json to_json(const AnnotationSet& a) {
  json labels = json::object();
  for (const auto& [id, l] : a.labels) labels[id] = label_to_json(l);
  return {{"annotator", a.annotator}, {"labels", labels}, {"summary", a.summary}};
}

AnnotationSet annotation_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("annotation must be an object", "annotation");
  AnnotationSet a;
  if (auto it = j.find("annotator"); it != j.end()) {
    if (!it->is_string()) throw ValidationError("must be a string", "annotator");
    a.annotator = it->get<std::string>();
  }
  auto labels = j.find("labels");
  if (labels == j.end() || !labels->is_object()) {
    throw ValidationError("must be an object keyed by tweet id", "labels");
  }
  for (auto it = labels->begin(); it != labels->end(); ++it) {
    a.labels[it.key()] = label_from_json(it.value(), "labels." + it.key());
  }
  if (auto it = j.find("summary"); it != j.end()) {
    if (!it->is_string()) throw ValidationError("must be a string", "summary");
    a.summary = it->get<std::string>();
  }
  return a;
}

json to_json(const Timeline& t) {
  json tweets = json::array();
  for (const auto& tw : t.tweets) {
    json o = {{"id", tw.id}, {"text", tw.text}};
    if (tw.time) o["time"] = format_rfc3339(*tw.time);
    tweets.push_back(o);
  }
  json anns = json::array();
  for (const auto& a : t.annotations) anns.push_back(to_json(a));
  json j = {{"id", t.id},
            {"domain", std::string(to_string(t.domain))},
            {"tweets", tweets},
            {"annotations", anns}};
  if (t.expert_labels) j["expert_labels"] = *t.expert_labels;
  return j;
}

Timeline timeline_from_json(const json& j) {
  if (!j.is_object()) throw DataError("timeline must be a JSON object");
  Timeline t;
  try {
    t.id = scalar_string(j.at("id"));
    t.domain = parse_domain(j.value("domain", "other"));
    for (const auto& tw : j.at("tweets")) {
      TimelineTweet x;
      x.id = scalar_string(tw.at("id"));
      x.text = tw.at("text").get<std::string>();
      if (auto it = tw.find("time"); it != tw.end() && !it->is_null()) {
        x.time = parse_rfc3339(it->get<std::string>());
      }
      t.tweets.push_back(std::move(x));
    }
    for (const auto& a : j.value("annotations", json::array())) {
      t.annotations.push_back(annotation_from_json(a));
    }
    if (auto it = j.find("expert_labels"); it != j.end() && !it->is_null()) {
      t.expert_labels = it->get<std::map<std::string, bool>>();
    }
  } catch (const json::exception& e) {
    throw DataError("timeline " + t.id + ": " + e.what());
  } catch (const ValidationError& e) {
    throw DataError("timeline " + t.id + ": " + e.what());
  }
  if (t.tweets.empty()) throw DataError("timeline " + t.id + " has no tweets");
  return t;
}

json to_json(const GoldTimeline& g) {
  json j = to_json(g.timeline);
  j["gold_labels"] = g.gold_labels;
  j["reference_summaries"] = g.reference_summaries;
  j["reference_annotators"] = {g.reference_annotators.first, g.reference_annotators.second};
  return j;
}

std::vector<Timeline> load_timelines(const std::filesystem::path& path) {
  json j = parse_json_file(path);
  if (!j.is_array()) throw DataError(path.string() + ": expected a JSON array of timelines");
  std::vector<Timeline> out;
  for (const auto& t : j) out.push_back(timeline_from_json(t));
  return out;
}

std::vector<GoldTimeline> golds_from_json(const json& j) {
  if (!j.is_array()) throw DataError("expected a JSON array of timelines");
  std::vector<GoldTimeline> out;
  for (const auto& item : j) {
    Timeline t = timeline_from_json(item);
    try {
      if (item.contains("gold_labels")) {
        GoldTimeline g;
        g.timeline = t;
        g.gold_labels = item["gold_labels"].get<std::map<std::string, bool>>();
        for (std::size_t i = 1; i < t.tweets.size(); ++i) {
          if (!g.gold_labels.count(t.tweets[i].id)) {
            throw DataError("timeline " + t.id + ": no gold label for " + t.tweets[i].id);
          }
        }
        g.reference_summaries =
            item.value("reference_summaries", std::vector<std::string>{});
        auto ra = item.value("reference_annotators", std::vector<std::string>{});
        if (ra.size() == 2) g.reference_annotators = {ra[0], ra[1]};
        out.push_back(std::move(g));
      } else {
        out.push_back(aggregate_majority(t));
      }
    } catch (const json::exception& e) {
      throw DataError("timeline " + t.id + ": " + e.what());
    } catch (const ValidationError& e) {
      throw DataError("timeline " + t.id + ": " + e.what());
    }
  }
  return out;
}

std::vector<GoldTimeline> load_golds(const std::filesystem::path& path) {
  try {
    return golds_from_json(parse_json_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void save_golds(const std::filesystem::path& path, std::span<const GoldTimeline> golds) {
  json arr = json::array();
  for (const auto& g : golds) arr.push_back(to_json(g));
  write_file(path, arr.dump(2) + "\n");
}

std::vector<GoldTimeline> select_split(std::span<const GoldTimeline> golds,
                                       std::span<const std::string> ids) {
  std::map<std::string, const GoldTimeline*> by_id;
  for (const auto& g : golds) by_id[g.id()] = &g;
  std::vector<GoldTimeline> out;
  for (const auto& id : ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw NotFoundError("timeline '" + id + "' not in the gold file");
    out.push_back(*it->second);
  }
  return out;
}

DatasetMapping DatasetMapping::from_json(const json& j) {
  if (!j.is_object()) throw DataError("dataset mapping must be a JSON object");
  DatasetMapping m;
  m.fields = {{"id", "id"},
              {"domain", "domain"},
              {"tweets", "tweets"},
              {"tweet_id", "id"},
              {"tweet_text", "text"},
              {"annotations", "annotations"},
              {"annotator", "annotator"},
              {"labels", "labels"},
              {"label", "label"},
              {"summary", "summary"},
              {"reason", "reason"},
              {"labels_cover", "non_seed"},
              {"in_values", json::array({true, 1, "1", "in", "yes", "true"})},
              {"domain_aliases", json::object()}};
  for (auto it = j.begin(); it != j.end(); ++it) m.fields[it.key()] = it.value();
  return m;
}

std::vector<Timeline> map_dataset(const json& records, const DatasetMapping& mapping) {
  const json f =
      DatasetMapping::from_json(mapping.fields.is_object() ? mapping.fields : json::object())
          .fields;
  auto str_field = [&](const char* key) -> std::optional<std::string> {
    auto it = f.find(key);
    if (it == f.end() || !it->is_string()) return std::nullopt;
    return it->get<std::string>();
  };
  const json& in_values = f["in_values"];
  auto is_in = [&](const json& v) {
    for (const auto& x : in_values) {
      if (x == v) return true;
      if (x.is_string() && v.is_string() &&
          ascii_lower(x.get<std::string>()) == ascii_lower(v.get<std::string>())) {
        return true;
      }
    }
    return false;
  };
  std::string label_key = str_field("label").value_or("label");
  std::string reason_key = str_field("reason").value_or("reason");
  auto parse_label = [&](const json& v) {
    TweetLabel l;
    const json* value = &v;
    if (v.is_object()) {
      value = at_path(v, label_key);
      if (!value) throw DataError("label object without '" + label_key + "'");
    }
    l.in_timeline = is_in(*value);
    if (v.is_object() && !l.in_timeline) {
      if (const json* r = at_path(v, reason_key); r && r->is_string() && !r->get<std::string>().empty()) {
        try {
          l.reason = parse_exclusion_reason(r->get<std::string>());
        } catch (const ValidationError&) {
        }
      }
    }
    return l;
  };
  bool cover_all = str_field("labels_cover").value_or("non_seed") == "all";

  // Labels given as an array aligned with the tweets, or an object keyed by
  // tweet id.
  auto read_labels = [&](const json& labels, const Timeline& t) {
    std::map<std::string, TweetLabel> out;
    if (labels.is_array()) {
      std::size_t offset = cover_all ? 0 : 1;
      for (std::size_t k = 0; k < labels.size(); ++k) {
        std::size_t idx = k + offset;
        if (idx == 0) continue;
        if (idx >= t.tweets.size()) throw DataError("more labels than tweets");
        out[t.tweets[idx].id] = parse_label(labels[k]);
      }
    } else if (labels.is_object()) {
      for (auto it = labels.begin(); it != labels.end(); ++it) {
        if (!t.tweets.empty() && it.key() == t.tweets[0].id) continue;
        out[it.key()] = parse_label(it.value());
      }
    } else {
      throw DataError("labels must be an array or an object");
    }
    return out;
  };

  const json* list = &records;
  if (auto root = str_field("records")) {
    list = at_path(records, *root);
    if (!list) throw DataError("mapping: records path '" + *root + "' not found");
  }
  if (!list->is_array()) throw DataError("dataset records must be a JSON array");

  std::vector<Timeline> out;
  std::size_t index = 0;
  for (const auto& rec : *list) {
    ++index;
    Timeline t;
    try {
      const json* id = at_path(rec, *str_field("id"));
      t.id = id ? scalar_string(*id) : "tl-" + std::to_string(index);
      if (const json* d = at_path(rec, *str_field("domain"))) {
        std::string name = ascii_lower(trim(scalar_string(*d)));
        if (auto alias = f["domain_aliases"].find(name); alias != f["domain_aliases"].end()) {
          name = alias->get<std::string>();
        }
        t.domain = parse_domain(name);
      }
      const json* tweets = at_path(rec, *str_field("tweets"));
      if (!tweets || !tweets->is_array()) throw DataError("missing tweets array");
      auto time_key = str_field("tweet_time");
      for (std::size_t i = 0; i < tweets->size(); ++i) {
        const json& tw = (*tweets)[i];
        TimelineTweet x;
        if (tw.is_string()) {
          x.text = tw.get<std::string>();
        } else {
          const json* tid = at_path(tw, *str_field("tweet_id"));
          if (tid) x.id = scalar_string(*tid);
          const json* text = at_path(tw, *str_field("tweet_text"));
          if (!text || !text->is_string()) throw DataError("tweet without text");
          x.text = text->get<std::string>();
          if (time_key) {
            if (const json* tm = at_path(tw, *time_key); tm && tm->is_string()) {
              x.time = parse_rfc3339(tm->get<std::string>());
            }
          }
        }
        if (x.id.empty()) x.id = t.id + "-" + std::to_string(i);
        t.tweets.push_back(std::move(x));
      }
      if (t.tweets.empty()) throw DataError("timeline without tweets");

      if (auto per_tweet = str_field("tweet_labels")) {
        // Per-tweet arrays of labels, one entry per annotator.
        std::size_t workers = 0;
        for (std::size_t i = 1; i < t.tweets.size(); ++i) {
          const json* l = at_path((*tweets)[i], *per_tweet);
          if (!l || !l->is_array()) throw DataError("tweet without label array");
          workers = std::max(workers, l->size());
        }
        const json* summaries = nullptr;
        if (auto s = str_field("summaries")) summaries = at_path(rec, *s);
        for (std::size_t w = 0; w < workers; ++w) {
          AnnotationSet a;
          a.annotator = "w" + std::to_string(w + 1);
          for (std::size_t i = 1; i < t.tweets.size(); ++i) {
            const json& l = *at_path((*tweets)[i], *per_tweet);
            if (w < l.size()) a.labels[t.tweets[i].id] = parse_label(l[w]);
          }
          if (summaries && summaries->is_array() && w < summaries->size()) {
            a.summary = scalar_string((*summaries)[w]);
          }
          t.annotations.push_back(std::move(a));
        }
      } else if (const json* anns = at_path(rec, *str_field("annotations"))) {
        if (!anns->is_array()) throw DataError("annotations must be an array");
        for (std::size_t w = 0; w < anns->size(); ++w) {
          const json& aj = (*anns)[w];
          AnnotationSet a;
          const json* who = at_path(aj, *str_field("annotator"));
          a.annotator = who ? scalar_string(*who) : "w" + std::to_string(w + 1);
          const json* labels = at_path(aj, *str_field("labels"));
          if (!labels) throw DataError("annotation without labels");
          a.labels = read_labels(*labels, t);
          if (const json* s = at_path(aj, *str_field("summary")); s && s->is_string()) {
            a.summary = s->get<std::string>();
          }
          t.annotations.push_back(std::move(a));
        }
      }

      if (auto ek = str_field("expert_labels")) {
        if (const json* e = at_path(rec, *ek); e && !e->is_null()) {
          std::map<std::string, bool> expert;
          for (const auto& [id, l] : read_labels(*e, t)) expert[id] = l.in_timeline;
          t.expert_labels = std::move(expert);
        }
      } else if (auto tk = str_field("tweet_expert_label")) {
        std::map<std::string, bool> expert;
        for (std::size_t i = 1; i < t.tweets.size(); ++i) {
          if (const json* e = at_path((*tweets)[i], *tk); e && !e->is_null()) {
            expert[t.tweets[i].id] = parse_label(*e).in_timeline;
          }
        }
        if (!expert.empty()) t.expert_labels = std::move(expert);
      }
    } catch (const DataError& e) {
      throw DataError("record " + std::to_string(index) + " (" + t.id + "): " + e.what());
    } catch (const ValidationError& e) {
      throw DataError("record " + std::to_string(index) + " (" + t.id + "): " + e.what());
    } catch (const json::exception& e) {
      throw DataError("record " + std::to_string(index) + " (" + t.id + "): " + e.what());
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Timeline> load_mapped_dataset(const std::filesystem::path& data,
                                          const DatasetMapping& mapping) {
  std::string text = read_file(data);
  json records;
  try {
    records = json::parse(text);
  } catch (const json::parse_error&) {
    // Not a single document: JSON Lines.
    records = json::array();
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      try {
        records.push_back(json::parse(line));
      } catch (const json::parse_error& e) {
        throw DataError(data.string() + ": " + e.what(), line_no);
      }
    }
  }
  return map_dataset(records, mapping);
}

}  // namespace crisistl
