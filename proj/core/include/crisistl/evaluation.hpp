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

// Timeline extraction and summarization metrics, naive baselines and the
// one-sided Mann-Whitney U test.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "crisistl/timeline.hpp"

namespace crisistl {

struct ExtractionPrediction {
  std::string timeline_id;
  /// Predicted membership per tweet id.
  std::map<std::string, bool> labels;
};

struct SummaryPrediction {
  std::string timeline_id;
  std::string text;
};

struct AccuracyOptions {
  /// Scores the seed too (predicted "in" when absent from the labels).
  bool include_seed = false;
};

struct TimelineScore {
  std::string timeline_id;
  double accuracy = 0.0;  // fraction in [0, 1]
  std::size_t scored = 0;
};

struct AccuracyReport {
  /// Mean per-timeline accuracy x100 over timelines with scored tweets.
  double percent = 0.0;
  std::vector<TimelineScore> per_timeline;
  /// Timelines without any scored tweet, left out of the mean.
  std::size_t skipped = 0;
};

/// Every gold timeline needs a prediction covering all of its non-seed
/// tweets; gaps throw ValidationError naming the timeline and tweet.
AccuracyReport timeline_accuracy(std::span<const ExtractionPrediction> preds,
                                 std::span<const GoldTimeline> golds,
                                 const AccuracyOptions& opt = {});

/// The majority gold label over non-seed tweets of `train` (true = in);
/// ties predict out. Throws ValidationError without training labels.
bool majority_class_label(std::span<const GoldTimeline> train);

/// Constant predictions for every non-seed tweet.
std::vector<ExtractionPrediction> constant_predictions(std::span<const GoldTimeline> golds,
                                                       bool label);

/// Gold labels as predictions.
std::vector<ExtractionPrediction> oracle_predictions(std::span<const GoldTimeline> golds);

enum class SummaryMode { kFirst, kLast, kRandom };

std::string_view to_string(SummaryMode m);
SummaryMode parse_summary_mode(std::string_view name);

/// Text of the first, last or a seeded random gold member (seed included).
/// The random choice uses seed + fnv1a(timeline id).
SummaryPrediction naive_summary(const GoldTimeline& gold, SummaryMode mode, std::uint64_t seed = 42);

struct RougeOptions {
  bool stem = false;
  bool remove_stopwords = false;
  /// Multi-reference aggregation: best reference per metric, or the mean.
  bool mean_over_references = false;
};

/// Lowercase, characters outside [a-z0-9] become separators.
std::vector<std::string> rouge_tokenize(std::string_view text, const RougeOptions& opt = {});

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Clipped n-gram overlap; all zeros when either side has no n-grams.
Prf rouge_n_prf(std::span<const std::string> cand, std::span<const std::string> ref,
                std::size_t n);
double rouge_n(std::span<const std::string> cand, std::span<const std::string> ref,
               std::size_t n);
/// Token-level longest common subsequence.
Prf rouge_l_prf(std::span<const std::string> cand, std::span<const std::string> ref);
double rouge_l(std::span<const std::string> cand, std::span<const std::string> ref);

struct RougeScore {
  double r1 = 0.0;
  double r2 = 0.0;
  double rl = 0.0;
};

/// Throws ValidationError for an empty reference list.
RougeScore multi_ref_rouge(std::string_view candidate, std::span<const std::string> references,
                           const RougeOptions& opt = {});

struct RougeReport {
  /// Corpus means x100.
  RougeScore percent;
  std::map<std::string, RougeScore> per_timeline;
};

/// Unweighted mean over gold timelines; each needs a prediction.
RougeReport summarization_report(std::span<const SummaryPrediction> preds,
                                 std::span<const GoldTimeline> golds,
                                 const RougeOptions& opt = {});

enum class MannWhitneyMethod { kAuto, kExact, kNormal };

struct MannWhitneyResult {
  /// U of sample a: pairs with a > b plus half the ties.
  double u = 0.0;
  /// n·m - u.
  double u_other = 0.0;
  /// One-sided P(U >= u) under the null, alternative a > b.
  double p = 1.0;
  bool exact = false;
};

/// Auto picks exact enumeration over midranks when n·m <= 400, else the
/// normal approximation with tie and continuity corrections.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                                 MannWhitneyMethod method = MannWhitneyMethod::kAuto);

/// JSON Lines: {"timeline_id", "labels": {tweet_id: bool}}.
std::vector<ExtractionPrediction> load_extraction_predictions(const std::filesystem::path& path);
void save_extraction_predictions(const std::filesystem::path& path,
                                 std::span<const ExtractionPrediction> preds);
/// JSON Lines: {"timeline_id", "summary"}.
std::vector<SummaryPrediction> load_summary_predictions(const std::filesystem::path& path);
void save_summary_predictions(const std::filesystem::path& path,
                              std::span<const SummaryPrediction> preds);

nlohmann::json to_json(const AccuracyReport& r);
nlohmann::json to_json(const RougeReport& r);

/// "| name | 48.57 |" style rows.
std::string format_accuracy_row(std::string_view name, const AccuracyReport& r);
std::string format_rouge_row(std::string_view name, const RougeReport& r);

}  // namespace crisistl
