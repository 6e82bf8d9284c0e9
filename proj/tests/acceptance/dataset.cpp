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

// Dataset criteria. $CRISISTL_DATASET names a directory holding either
//   dataset.json | dataset.jsonl   all timelines, plus optional splits.json
// or
//   train.json(l), dev.json(l), test.json(l)
// in the native timeline format. A mapping.json next to them switches to
// map_dataset for an external layout.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "acceptance.hpp"
#include "crisistl/config.hpp"
#include "crisistl/error.hpp"
#include "crisistl/evaluation.hpp"
#include "crisistl/timeline.hpp"

namespace acceptance {
namespace {

using namespace crisistl;
namespace fs = std::filesystem;
using json = nlohmann::json;

struct Row {
  std::size_t timelines, tweets, in, out;
  std::array<std::size_t, kBucketCount> buckets;
};

const std::vector<std::pair<Domain, Row>> kExpectedRows{
    {Domain::kWildfire, {423, 4829, 1961, 2868, {175, 140, 59, 49}}},
    {Domain::kTraffic, {287, 2340, 831, 1509, {158, 95, 20, 14}}},
    {Domain::kFire, {155, 1469, 640, 829, {76, 45, 22, 12}}},
    {Domain::kStorm, {109, 1767, 789, 978, {21, 43, 27, 18}}},
    {Domain::kOther, {26, 205, 82, 123, {17, 8, 0, 1}}},
};
const Row kExpectedTotal{1000, 10610, 4303, 6307, {447, 331, 128, 94}};

constexpr double kStatsBudgetSeconds = 5.0;
constexpr double kAgreementPercent = 90.06;
constexpr double kAgreementTol = 0.5;
constexpr double kExpertAgreementPercent = 91.77;
constexpr double kExpertAgreementTol = 0.5;
constexpr double kMajorityDevPercent = 48.57;
constexpr double kMajorityTol = 2.0;
constexpr RougeScore kFirstTweet{32.15, 14.35, 24.09};
constexpr RougeScore kLastTweet{28.69, 12.03, 21.65};
constexpr RougeScore kRandomTweet{30.56, 13.61, 23.24};
constexpr double kNaiveRougeTol = 2.0;
constexpr double kRandomRougeTol = 4.0;
constexpr std::uint64_t kRandomSeed = 42;
constexpr int kRandomSeeds = 10;

const char* const kCriteria[] = {"dataset.table1",          "dataset.table2",
                                 "dataset.stats-runtime",   "dataset.agreement",
                                 "dataset.expert-agreement", "dataset.majority-dev",
                                 "dataset.first-tweet-rouge", "dataset.last-tweet-rouge",
                                 "dataset.random-tweet-rouge"};

std::optional<fs::path> find_file(const fs::path& dir, const std::string& stem) {
  for (const char* ext : {".json", ".jsonl"}) {
    fs::path p = dir / (stem + ext);
    if (fs::is_regular_file(p)) return p;
  }
  return std::nullopt;
}

/// JSON array or JSON Lines.
json read_records(const fs::path& path) {
  std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
  }
  json arr = json::array();
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      arr.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw DataError(path.string() + ": " + e.what(), n);
    }
  }
  return arr;
}

std::vector<GoldTimeline> load_part(const fs::path& path, const std::optional<DatasetMapping>& m) {
  json records = read_records(path);
  if (!m) return golds_from_json(records);
  std::vector<GoldTimeline> out;
  for (const auto& t : map_dataset(records, *m)) out.push_back(aggregate_majority(t));
  return out;
}

struct Loaded {
  std::vector<GoldTimeline> golds;
  std::optional<Splits> splits;
  std::string source;
};

Loaded load(const fs::path& dir) {
  std::optional<DatasetMapping> mapping;
  if (fs::is_regular_file(dir / "mapping.json"))
    mapping = DatasetMapping::from_json(json::parse(read_file(dir / "mapping.json")));
  Loaded l;
  if (auto whole = find_file(dir, "dataset")) {
    l.golds = load_part(*whole, mapping);
    l.source = whole->filename().string();
    if (fs::is_regular_file(dir / "splits.json")) l.splits = load_splits(dir / "splits.json");
    return l;
  }
  Splits s;
  for (const char* name : {"train", "dev", "test"}) {
    auto p = find_file(dir, name);
    if (!p) throw DataError("no dataset.json(l) or " + std::string(name) + ".json(l) in " + dir.string());
    auto part = load_part(*p, mapping);
    auto& ids = name[0] == 't' ? (name[1] == 'r' ? s.train : s.test) : s.dev;
    for (auto& g : part) {
      ids.push_back(g.id());
      l.golds.push_back(std::move(g));
    }
  }
  l.splits = s;
  l.source = "train/dev/test files";
  return l;
}

Row row_of(const DomainStats& d) { return {d.timelines, d.tweets, d.in, d.out, d.buckets}; }

std::string describe(const Row& r) {
  std::ostringstream s;
  s << r.timelines << "/" << r.tweets << "/" << r.in << "/" << r.out << " [" << r.buckets[0] << ","
    << r.buckets[1] << "," << r.buckets[2] << "," << r.buckets[3] << "]";
  return s.str();
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << v;
  return s.str();
}

std::string fmt(const RougeScore& r) { return fmt(r.r1) + "/" + fmt(r.r2) + "/" + fmt(r.rl); }

bool within(const RougeScore& got, const RougeScore& want, double tol) {
  return std::abs(got.r1 - want.r1) <= tol && std::abs(got.r2 - want.r2) <= tol &&
         std::abs(got.rl - want.rl) <= tol;
}

struct ModeResult {
  std::string name;
  bool table1 = true;
  bool table2 = true;
  std::string mismatch;
};

ModeResult check_mode(const DatasetStats& st, const std::string& name) {
  ModeResult m{name};
  auto get = [&](Domain d) {
    auto it = st.domains.find(d);
    return it == st.domains.end() ? Row{0, 0, 0, 0, {}} : row_of(it->second);
  };
  std::vector<std::tuple<std::string, Row, Row>> rows;
  for (const auto& [d, want] : kExpectedRows) rows.emplace_back(std::string(to_string(d)), get(d), want);
  rows.emplace_back("total", row_of(st.total), kExpectedTotal);
  for (const auto& [label, got, want] : rows) {
    bool t1 = got.timelines == want.timelines && got.tweets == want.tweets && got.in == want.in &&
              got.out == want.out;
    bool t2 = got.buckets == want.buckets;
    if ((!t1 || !t2) && m.mismatch.empty())
      m.mismatch = label + " " + describe(got) + " vs " + describe(want);
    m.table1 = m.table1 && t1;
    m.table2 = m.table2 && t2;
  }
  return m;
}

}  // namespace

int run_dataset(std::ostream& out) {
  const char* env = std::getenv("CRISISTL_DATASET");
  if (env == nullptr || !fs::is_directory(env)) {
    for (const char* c : kCriteria)
      out << "SKIP " << c << ": set CRISISTL_DATASET to the published dataset directory\n";
    return kSkipped;
  }
  bool ok = true;
  try {
    auto start = std::chrono::steady_clock::now();
    Loaded data = load(env);
    std::vector<ModeResult> modes;
    for (bool count_seed : {true, false}) {
      for (auto lm : {LengthMode::kAllTweets, LengthMode::kGoldMembers}) {
        StatsOptions opt{count_seed, lm};
        std::string name = std::string(count_seed ? "seed counted" : "seed excluded") + ", " +
                           (lm == LengthMode::kAllTweets ? "length=all tweets" : "length=gold members");
        modes.push_back(check_mode(dataset_stats(data.golds, opt), name));
      }
    }
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    auto pick = [&](bool ModeResult::*field) -> const ModeResult* {
      for (const auto& m : modes)
        if (m.*field) return &m;
      return nullptr;
    };
    const ModeResult* t1 = pick(&ModeResult::table1);
    const ModeResult* t2 = pick(&ModeResult::table2);
    ok &= report(out, t1 != nullptr, "dataset.table1",
                 t1 ? "all domain rows match exactly (" + t1->name + ")"
                    : "no counting convention matches; e.g. " + modes[0].mismatch);
    ok &= report(out, t2 != nullptr, "dataset.table2",
                 t2 ? "length buckets match exactly (" + t2->name + ")"
                    : "no counting convention matches; e.g. " + modes[0].mismatch);
    ok &= report(out, seconds < kStatsBudgetSeconds, "dataset.stats-runtime",
                 "load and statistics in " + fmt(seconds) + " s over " +
                     std::to_string(data.golds.size()) + " timelines from " + data.source);

    std::vector<Timeline> timelines;
    for (const auto& g : data.golds) timelines.push_back(g.timeline);
    double agreement = 100.0 * corpus_agreement(timelines);
    ok &= report(out, std::abs(agreement - kAgreementPercent) <= kAgreementTol, "dataset.agreement",
                 "best-pair agreement " + fmt(agreement) + " vs 90.06 +/- 0.5");
    if (auto expert = expert_agreement(data.golds)) {
      double pct = 100.0 * expert->agreement;
      ok &= report(out, std::abs(pct - kExpertAgreementPercent) <= kExpertAgreementTol,
                   "dataset.expert-agreement",
                   fmt(pct) + " over " + std::to_string(expert->timelines) +
                       " timelines vs 91.77 +/- 0.5");
    } else {
      out << "SKIP dataset.expert-agreement: not reproducible, the dataset carries no expert "
             "labels\n";
    }

    Splits splits;
    std::string split_note = "shipped splits";
    if (data.splits) {
      splits = *data.splits;
    } else {
      splits = stratified_split(data.golds, {0.8, 0.1, 0.1}, kRandomSeed);
      split_note = "generated 80/10/10 split, seed 42";
    }
    auto train = select_split(data.golds, splits.train);
    auto dev = select_split(data.golds, splits.dev);
    bool label = majority_class_label(train);
    auto acc = timeline_accuracy(constant_predictions(dev, label), dev);
    ok &= report(out, std::abs(acc.percent - kMajorityDevPercent) <= kMajorityTol,
                 "dataset.majority-dev",
                 "constant '" + std::string(label ? "in" : "out") + "' scores " + fmt(acc.percent) +
                     " on dev vs 48.57 +/- 2 (" + split_note + ")");

    auto naive = [&](SummaryMode mode, std::uint64_t seed) {
      std::vector<SummaryPrediction> preds;
      for (const auto& g : dev) preds.push_back(naive_summary(g, mode, seed));
      return summarization_report(preds, dev).percent;
    };
    auto first = naive(SummaryMode::kFirst, kRandomSeed);
    ok &= report(out, within(first, kFirstTweet, kNaiveRougeTol), "dataset.first-tweet-rouge",
                 "R1/R2/RL " + fmt(first) + " on dev vs " + fmt(kFirstTweet) + " +/- 2");
    auto last = naive(SummaryMode::kLast, kRandomSeed);
    ok &= report(out, within(last, kLastTweet, kNaiveRougeTol), "dataset.last-tweet-rouge",
                 "R1/R2/RL " + fmt(last) + " on dev vs " + fmt(kLastTweet) + " +/- 2");
    RougeScore mean;
    for (int i = 0; i < kRandomSeeds; ++i) {
      auto s = naive(SummaryMode::kRandom, kRandomSeed + static_cast<std::uint64_t>(i));
      mean.r1 += s.r1 / kRandomSeeds;
      mean.r2 += s.r2 / kRandomSeeds;
      mean.rl += s.rl / kRandomSeeds;
    }
    ok &= report(out, within(mean, kRandomTweet, kRandomRougeTol), "dataset.random-tweet-rouge",
                 "R1/R2/RL " + fmt(mean) + " on dev (mean of seeds 42-51) vs " + fmt(kRandomTweet) +
                     " +/- 4");
  } catch (const std::exception& e) {
    report(out, false, "dataset.load", e.what());
    return 1;
  }
  return ok ? 0 : 1;
}

}  // namespace acceptance
