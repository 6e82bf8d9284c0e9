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

#include "crisistl/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "crisistl/config.hpp"
#include "crisistl/error.hpp"
#include "crisistl/text.hpp"

namespace crisistl {

using nlohmann::json;

namespace {

const std::set<std::string>& rouge_stopwords() {
  static const std::set<std::string> words = {
      "a",    "an",   "and",  "are", "as",   "at",   "be",   "by",    "for",   "from",
      "has",  "he",   "in",   "is",  "it",   "its",  "of",   "on",    "that",  "the",
      "to",   "was",  "were", "will", "with", "this", "there", "their", "they", "or"};
  return words;
}

Prf make_prf(std::size_t overlap, std::size_t cand, std::size_t ref) {
  Prf r;
  if (cand == 0 || ref == 0) return r;
  r.precision = static_cast<double>(overlap) / static_cast<double>(cand);
  r.recall = static_cast<double>(overlap) / static_cast<double>(ref);
  if (overlap > 0) r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

std::map<std::vector<std::string>, std::size_t> ngram_counts(std::span<const std::string> toks,
                                                             std::size_t n) {
  std::map<std::vector<std::string>, std::size_t> out;
  if (toks.size() < n) return out;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    out[std::vector<std::string>(toks.begin() + static_cast<std::ptrdiff_t>(i),
                                 toks.begin() + static_cast<std::ptrdiff_t>(i + n))]++;
  }
  return out;
}

template <typename T>
std::vector<T> load_jsonl(const std::filesystem::path& path, T (*parse)(const json&)) {
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t line_no = 0;
  std::vector<T> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      out.push_back(parse(json::parse(line)));
    } catch (const json::exception& e) {
      throw DataError(path.string() + ": " + e.what(), line_no);
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + e.what(), line_no);
    }
  }
  return out;
}

ExtractionPrediction parse_extraction(const json& j) {
  if (!j.is_object() || !j.contains("timeline_id") || !j.contains("labels")) {
    throw DataError("expected {\"timeline_id\", \"labels\"}");
  }
  ExtractionPrediction p;
  p.timeline_id = j["timeline_id"].get<std::string>();
  p.labels = j["labels"].get<std::map<std::string, bool>>();
  return p;
}

SummaryPrediction parse_summary(const json& j) {
  if (!j.is_object() || !j.contains("timeline_id") || !j.contains("summary")) {
    throw DataError("expected {\"timeline_id\", \"summary\"}");
  }
  return {j["timeline_id"].get<std::string>(), j["summary"].get<std::string>()};
}

// Standard normal upper tail.
double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

AccuracyReport timeline_accuracy(std::span<const ExtractionPrediction> preds,
                                 std::span<const GoldTimeline> golds,
                                 const AccuracyOptions& opt) {
  std::map<std::string, const ExtractionPrediction*> by_id;
  for (const auto& p : preds) {
    if (!by_id.emplace(p.timeline_id, &p).second) {
      throw ValidationError("duplicate prediction for timeline " + p.timeline_id, "timeline_id");
    }
  }
  std::vector<const GoldTimeline*> order;
  for (const auto& g : golds) order.push_back(&g);
  std::sort(order.begin(), order.end(),
            [](const GoldTimeline* a, const GoldTimeline* b) { return a->id() < b->id(); });

  AccuracyReport report;
  double sum = 0.0;
  for (const GoldTimeline* g : order) {
    auto it = by_id.find(g->id());
    if (it == by_id.end()) {
      throw ValidationError("no prediction for timeline " + g->id(), "timeline_id");
    }
    const auto& labels = it->second->labels;
    const auto& tweets = g->timeline.tweets;
    std::size_t correct = 0, scored = 0;
    for (std::size_t i = opt.include_seed ? 0 : 1; i < tweets.size(); ++i) {
      auto l = labels.find(tweets[i].id);
      bool predicted;
      if (l != labels.end()) {
        predicted = l->second;
      } else if (i == 0) {
        predicted = true;
      } else {
        throw ValidationError("timeline " + g->id() + " has no prediction for tweet " +
                                  tweets[i].id,
                              "labels." + tweets[i].id);
      }
      ++scored;
      if (predicted == g->in_timeline(i)) ++correct;
    }
    if (scored == 0) {
      ++report.skipped;
      continue;
    }
    double acc = static_cast<double>(correct) / static_cast<double>(scored);
    report.per_timeline.push_back({g->id(), acc, scored});
    sum += acc;
  }
  if (!report.per_timeline.empty()) {
    report.percent = 100.0 * sum / static_cast<double>(report.per_timeline.size());
  }
  return report;
}

bool majority_class_label(std::span<const GoldTimeline> train) {
  std::size_t in = 0, out = 0;
  for (const auto& g : train) {
    for (const auto& [id, label] : g.gold_labels) (label ? in : out)++;
  }
  if (in + out == 0) throw ValidationError("training split has no labeled tweets", "train");
  return in > out;
}

std::vector<ExtractionPrediction> constant_predictions(std::span<const GoldTimeline> golds,
                                                       bool label) {
  std::vector<ExtractionPrediction> out;
  for (const auto& g : golds) {
    ExtractionPrediction p{g.id(), {}};
    for (std::size_t i = 1; i < g.timeline.tweets.size(); ++i) {
      p.labels[g.timeline.tweets[i].id] = label;
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<ExtractionPrediction> oracle_predictions(std::span<const GoldTimeline> golds) {
  std::vector<ExtractionPrediction> out;
  for (const auto& g : golds) out.push_back({g.id(), g.gold_labels});
  return out;
}

std::string_view to_string(SummaryMode m) {
  switch (m) {
    case SummaryMode::kFirst: return "first";
    case SummaryMode::kLast: return "last";
    case SummaryMode::kRandom: return "random";
  }
  return "first";
}

SummaryMode parse_summary_mode(std::string_view name) {
  if (name == "first") return SummaryMode::kFirst;
  if (name == "last") return SummaryMode::kLast;
  if (name == "random") return SummaryMode::kRandom;
  throw ValidationError("unknown summary mode '" + std::string(name) + "'", "mode");
}

SummaryPrediction naive_summary(const GoldTimeline& gold, SummaryMode mode, std::uint64_t seed) {
  auto members = gold.members();
  if (members.empty()) throw ValidationError("timeline " + gold.id() + " is empty", "tweets");
  const TimelineTweet* pick = members.front();
  if (mode == SummaryMode::kLast) {
    pick = members.back();
  } else if (mode == SummaryMode::kRandom) {
    std::mt19937_64 rng(seed + fnv1a(gold.id()));
    pick = members[uniform_below(rng, members.size())];
  }
  return {gold.id(), pick->text};
}

std::vector<std::string> rouge_tokenize(std::string_view text, const RougeOptions& opt) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    if (!(opt.remove_stopwords && rouge_stopwords().count(cur))) {
      out.push_back(opt.stem ? stem(cur) : cur);
    }
    cur.clear();
  };
  for (char ch : text) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      cur.push_back(static_cast<char>(c));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

Prf rouge_n_prf(std::span<const std::string> cand, std::span<const std::string> ref,
                std::size_t n) {
  if (n == 0) throw ValidationError("n must be >= 1", "n");
  auto cc = ngram_counts(cand, n);
  auto rc = ngram_counts(ref, n);
  std::size_t overlap = 0;
  for (const auto& [gram, count] : cc) {
    auto it = rc.find(gram);
    if (it != rc.end()) overlap += std::min(count, it->second);
  }
  std::size_t cn = cand.size() >= n ? cand.size() - n + 1 : 0;
  std::size_t rn = ref.size() >= n ? ref.size() - n + 1 : 0;
  return make_prf(overlap, cn, rn);
}

double rouge_n(std::span<const std::string> cand, std::span<const std::string> ref,
               std::size_t n) {
  return rouge_n_prf(cand, ref, n).f1;
}

Prf rouge_l_prf(std::span<const std::string> cand, std::span<const std::string> ref) {
  return make_prf(lcs_length(cand, ref), cand.size(), ref.size());
}

double rouge_l(std::span<const std::string> cand, std::span<const std::string> ref) {
  return rouge_l_prf(cand, ref).f1;
}

RougeScore multi_ref_rouge(std::string_view candidate, std::span<const std::string> references,
                           const RougeOptions& opt) {
  if (references.empty()) throw ValidationError("at least one reference required", "references");
  auto cand = rouge_tokenize(candidate, opt);
  RougeScore out;
  for (const auto& r : references) {
    auto ref = rouge_tokenize(r, opt);
    RougeScore s{rouge_n(cand, ref, 1), rouge_n(cand, ref, 2), rouge_l(cand, ref)};
    if (opt.mean_over_references) {
      out.r1 += s.r1;
      out.r2 += s.r2;
      out.rl += s.rl;
    } else {
      out.r1 = std::max(out.r1, s.r1);
      out.r2 = std::max(out.r2, s.r2);
      out.rl = std::max(out.rl, s.rl);
    }
  }
  if (opt.mean_over_references) {
    double k = static_cast<double>(references.size());
    out = {out.r1 / k, out.r2 / k, out.rl / k};
  }
  return out;
}

RougeReport summarization_report(std::span<const SummaryPrediction> preds,
                                 std::span<const GoldTimeline> golds, const RougeOptions& opt) {
  std::map<std::string, const SummaryPrediction*> by_id;
  for (const auto& p : preds) by_id[p.timeline_id] = &p;
  RougeReport report;
  for (const auto& g : golds) {
    auto it = by_id.find(g.id());
    if (it == by_id.end()) {
      throw ValidationError("no summary for timeline " + g.id(), "timeline_id");
    }
    if (g.reference_summaries.empty()) {
      throw ValidationError("timeline " + g.id() + " has no reference summaries", "references");
    }
    report.per_timeline[g.id()] = multi_ref_rouge(it->second->text, g.reference_summaries, opt);
  }
  if (!report.per_timeline.empty()) {
    RougeScore sum;
    for (const auto& [id, s] : report.per_timeline) {
      sum.r1 += s.r1;
      sum.r2 += s.r2;
      sum.rl += s.rl;
    }
    double k = static_cast<double>(report.per_timeline.size());
    report.percent = {100.0 * sum.r1 / k, 100.0 * sum.r2 / k, 100.0 * sum.rl / k};
  }
  return report;
}

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                                 MannWhitneyMethod method) {
  if (a.empty() || b.empty()) throw ValidationError("samples must be non-empty", "sample");
  const std::size_t n = a.size(), m = b.size(), total = n + m;

  // Pooled midranks, doubled so they stay integral.
  std::vector<std::pair<double, bool>> pooled;
  for (double x : a) pooled.emplace_back(x, true);
  for (double x : b) pooled.emplace_back(x, false);
  std::sort(pooled.begin(), pooled.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<std::size_t> rank2(total);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < total;) {
    std::size_t j = i;
    while (j < total && pooled[j].first == pooled[i].first) ++j;
    // Ranks i+1..j average to (i+1+j)/2.
    for (std::size_t k = i; k < j; ++k) rank2[k] = i + 1 + j;
    double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  std::size_t obs2 = 0;
  for (std::size_t k = 0; k < total; ++k) {
    if (pooled[k].second) obs2 += rank2[k];
  }
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  MannWhitneyResult r;
  r.u = static_cast<double>(obs2) / 2.0 - nn * (nn + 1.0) / 2.0;
  r.u_other = nn * mm - r.u;

  bool exact = method == MannWhitneyMethod::kExact ||
               (method == MannWhitneyMethod::kAuto && n * m <= 400);
  if (exact) {
    // ways[k][s]: subsets of size k with doubled rank sum s. The smaller
    // sample is enumerated; its sum determines the other's.
    std::size_t max_sum = 0;
    for (auto v : rank2) max_sum += v;
    const std::size_t kk = std::min(n, m);
    std::vector<std::vector<double>> ways(kk + 1, std::vector<double>(max_sum + 1, 0.0));
    ways[0][0] = 1.0;
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t v = rank2[idx];
      for (std::size_t k = std::min(kk, idx + 1); k >= 1; --k) {
        auto& dst = ways[k];
        const auto& src = ways[k - 1];
        for (std::size_t s = max_sum; s >= v; --s) {
          dst[s] += src[s - v];
          if (s == v) break;
        }
      }
    }
    double all = 0.0, tail = 0.0;
    for (std::size_t s = 0; s <= max_sum; ++s) {
      all += ways[kk][s];
      bool extreme = n <= m ? s >= obs2 : s <= max_sum - obs2;
      if (extreme) tail += ways[kk][s];
    }
    r.p = tail / all;
    r.exact = true;
    return r;
  }
  const double big_n = static_cast<double>(total);
  double mu = nn * mm / 2.0;
  double var = nn * mm / 12.0 * ((big_n + 1.0) - tie_term / (big_n * (big_n - 1.0)));
  if (var <= 0.0) {
    r.p = 1.0;
    return r;
  }
  double z = (r.u - mu - 0.5) / std::sqrt(var);
  r.p = normal_sf(z);
  return r;
}

std::vector<ExtractionPrediction> load_extraction_predictions(const std::filesystem::path& path) {
  return load_jsonl<ExtractionPrediction>(path, &parse_extraction);
}

void save_extraction_predictions(const std::filesystem::path& path,
                                 std::span<const ExtractionPrediction> preds) {
  std::string out;
  for (const auto& p : preds) {
    out += json{{"timeline_id", p.timeline_id}, {"labels", p.labels}}.dump() + "\n";
  }
  write_file(path, out);
}

std::vector<SummaryPrediction> load_summary_predictions(const std::filesystem::path& path) {
  return load_jsonl<SummaryPrediction>(path, &parse_summary);
}

void save_summary_predictions(const std::filesystem::path& path,
                              std::span<const SummaryPrediction> preds) {
  std::string out;
  for (const auto& p : preds) {
    out += json{{"timeline_id", p.timeline_id}, {"summary", p.text}}.dump() + "\n";
  }
  write_file(path, out);
}

json to_json(const AccuracyReport& r) {
  json per = json::object();
  for (const auto& s : r.per_timeline) per[s.timeline_id] = s.accuracy;
  return {{"accuracy", r.percent},
          {"timelines", r.per_timeline.size()},
          {"skipped", r.skipped},
          {"per_timeline", per}};
}

json to_json(const RougeReport& r) {
  json per = json::object();
  for (const auto& [id, s] : r.per_timeline) per[id] = {s.r1, s.r2, s.rl};
  return {{"r1", r.percent.r1},
          {"r2", r.percent.r2},
          {"rl", r.percent.rl},
          {"timelines", r.per_timeline.size()},
          {"per_timeline", per}};
}

std::string format_accuracy_row(std::string_view name, const AccuracyReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "| %-20.*s | %6.2f |", static_cast<int>(name.size()),
                name.data(), r.percent);
  return buf;
}

std::string format_rouge_row(std::string_view name, const RougeReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "| %-20.*s | %6.2f | %6.2f | %6.2f |",
                static_cast<int>(name.size()), name.data(), r.percent.r1, r.percent.r2,
                r.percent.rl);
  return buf;
}

}  // namespace crisistl
