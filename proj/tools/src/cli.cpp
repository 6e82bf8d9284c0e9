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

#include "crisistl_tools/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <optional>
#include <thread>

#include "crisistl/config.hpp"
#include "crisistl/error.hpp"
#include "crisistl/evaluation.hpp"
#include "crisistl/pipeline.hpp"
#include "crisistl/review.hpp"
#include "crisistl/stream.hpp"
#include "crisistl/timeline.hpp"
#include "crisistl_tools/review_http.hpp"

namespace crisistl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

struct GoldInput {
  std::string gold;
  std::string mapping;
  std::string splits;
  std::string split;
};

void add_gold_options(CLI::App* cmd, GoldInput& in, bool with_split) {
  cmd->add_option("--gold", in.gold, "Gold or annotated timelines (JSON)")->required();
  cmd->add_option("--mapping", in.mapping, "Field mapping for an external dataset layout");
  if (with_split) {
    cmd->add_option("--splits", in.splits, "Splits file from `split`");
    cmd->add_option("--split", in.split, "train, dev or test")
        ->check(CLI::IsMember({"train", "dev", "test"}));
  }
}

std::vector<Timeline> load_annotated(const GoldInput& in) {
  if (in.mapping.empty()) return load_timelines(in.gold);
  json m = json::parse(read_file(in.mapping));
  return load_mapped_dataset(in.gold, DatasetMapping::from_json(m));
}

std::vector<GoldTimeline> load_gold_input(const GoldInput& in) {
  std::vector<GoldTimeline> golds;
  if (in.mapping.empty()) {
    golds = load_golds(in.gold);
  } else {
    for (const auto& t : load_annotated(in)) golds.push_back(aggregate_majority(t));
  }
  if (!in.split.empty()) {
    if (in.splits.empty()) throw ValidationError("--split needs --splits", "splits");
    Splits s = load_splits(in.splits);
    return select_split(golds, s.by_name(in.split));
  }
  return golds;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_file(path, text);
  }
}

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    std::size_t next = csv.find(',', pos);
    if (next == std::string::npos) next = csv.size();
    std::string item = csv.substr(pos, next - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("'" + item + "' is not a number", "sample");
    }
    pos = next + 1;
  }
  return out;
}

int run_serve(const std::string& data, const std::string& host, int port,
              const std::vector<std::string>& tokens, std::ostream& out) {
  ReviewService::Config cfg;
  cfg.data_dir = data;
  cfg.tokens = tokens;
  ReviewService service(cfg);
  ReviewHttpServer server(service, host, port);
  out << "serving " << data << " on http://" << host << ":" << server.port() << " ("
      << service.imported_tasks() << " tasks imported)" << std::endl;
  g_stop = false;
  auto prev_int = std::signal(SIGINT, on_signal);
  auto prev_term = std::signal(SIGTERM, on_signal);
  std::thread watcher([&server] {
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
  });
  server.run();
  g_stop = true;
  watcher.join();
  std::signal(SIGINT, prev_int);
  std::signal(SIGTERM, prev_term);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Local crisis timeline extraction and evaluation", "crisistl"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "crisistl 0.1.0");

  std::function<int()> action;

  // ingest
  std::string stream_path, config_path, out_path;
  auto* ingest = app.add_subcommand("ingest", "Filter a stream by area, keywords and time window");
  ingest->add_option("--stream", stream_path, "Input stream (JSON Lines)")->required();
  ingest->add_option("--config", config_path, "Pipeline config (TOML)")->required();
  ingest->add_option("--out", out_path, "Filtered stream (JSON Lines)")->required();
  ingest->callback([&] {
    action = [&] {
      PipelineConfig cfg = load_pipeline_config(config_path);
      auto tweets = load_stream(stream_path);
      auto kept = filter_window(tweets, cfg.window);
      write_file(out_path, serialize_stream(kept));
      out << "kept " << kept.size() << " of " << tweets.size() << " tweets\n";
      return kExitOk;
    };
  });

  // cluster
  std::string in_path, queue_path;
  auto* cluster = app.add_subcommand("cluster", "Cluster a filtered stream into noisy timelines");
  cluster->add_option("--in", in_path, "Filtered stream (JSON Lines)")->required();
  cluster->add_option("--config", config_path, "Pipeline config (TOML)")->required();
  cluster->add_option("--out", out_path, "Cluster run (JSON)")->required();
  cluster->add_option("--merge-queue", queue_path, "Borderline merge candidates (JSON)");
  cluster->callback([&] {
    action = [&] {
      PipelineConfig cfg = load_pipeline_config(config_path);
      PipelineResources res(cfg);
      auto tweets = load_stream(in_path);
      PipelineResult r = run_pipeline(tweets, cfg, res.plugs());
      ClusterRun run{cfg.clustering, r.clusters, r.assignment_log, r.merge_log};
      save_cluster_run(out_path, run);
      if (!queue_path.empty()) save_merge_queue(queue_path, r.merge_candidates);
      out << r.filtered_tweets << " tweets, " << r.clusters.size() << " clusters, "
          << r.merge_candidates.size() << " merge candidates\n";
      return kExitOk;
    };
  });

  // refine
  std::string clusters_path, decisions_path, requeue_path;
  auto* refine = app.add_subcommand("refine", "Human review steps run headlessly");
  refine->require_subcommand(1);
  auto* apply = refine->add_subcommand("apply", "Apply merge decisions to a cluster run");
  apply->add_option("--clusters", clusters_path, "Cluster run (JSON)")->required();
  apply->add_option("--decisions", decisions_path, "Decided merge candidates (JSON)")->required();
  apply->add_option("--out", out_path, "Merged cluster run (JSON)")->required();
  apply->add_option("--requeue", requeue_path, "Remaining undecided candidates (JSON)");
  apply->callback([&] {
    action = [&] {
      ClusterRun run = load_cluster_run(clusters_path);
      auto decisions = load_merge_queue(decisions_path);
      RefineOutcome r = apply_decisions(run, decisions);
      save_cluster_run(out_path, r.run);
      if (!requeue_path.empty()) save_merge_queue(requeue_path, r.requeue);
      out << run.clusters.size() << " -> " << r.run.clusters.size() << " clusters, "
          << r.requeue.size() << " candidates left\n";
      return kExitOk;
    };
  });
  auto* export_tl = refine->add_subcommand("export-timelines", "Noisy timelines for annotation");
  export_tl->add_option("--clusters", clusters_path, "Cluster run (JSON)")->required();
  export_tl->add_option("--out", out_path, "Timelines (JSON)")->required();
  export_tl->callback([&] {
    action = [&] {
      json arr = json::array();
      for (const auto& t : noisy_timelines(load_cluster_run(clusters_path))) {
        arr.push_back(to_json(t));
      }
      write_file(out_path, dump_json(arr));
      out << arr.size() << " timelines\n";
      return kExitOk;
    };
  });

  // stats
  GoldInput gin;
  bool no_seed = false;
  std::string length_mode = "all";
  auto* stats = app.add_subcommand("stats", "Dataset statistics CSV");
  add_gold_options(stats, gin, true);
  stats->add_flag("--exclude-seed", no_seed, "Leave seed tweets out of every count");
  stats->add_option("--length", length_mode, "Bucket by all tweets or by gold members")
      ->check(CLI::IsMember({"all", "gold"}));
  stats->add_option("--out", out_path, "CSV output (default stdout)");
  stats->callback([&] {
    action = [&] {
      StatsOptions opt;
      opt.count_seed = !no_seed;
      opt.length_mode = length_mode == "gold" ? LengthMode::kGoldMembers : LengthMode::kAllTweets;
      emit(out_path, stats_csv(dataset_stats(load_gold_input(gin), opt)), out);
      return kExitOk;
    };
  });

  // agreement
  auto* agreement = app.add_subcommand("agreement", "Inter-annotator agreement");
  add_gold_options(agreement, gin, false);
  agreement->callback([&] {
    action = [&] {
      auto timelines = load_annotated(gin);
      std::vector<GoldTimeline> golds;
      for (const auto& t : timelines) golds.push_back(aggregate_majority(t));
      json report = {{"timelines", timelines.size()},
                     {"best_pair_agreement_percent", 100.0 * corpus_agreement(timelines)}};
      if (auto e = expert_agreement(golds)) {
        report["expert_timelines"] = e->timelines;
        report["expert_agreement_percent"] = 100.0 * e->agreement;
      } else {
        report["expert_agreement_percent"] = nullptr;
      }
      out << report.dump(2) << "\n";
      return kExitOk;
    };
  });

  // split
  std::uint64_t seed = 42;
  std::vector<double> fractions{0.7, 0.1, 0.2};
  auto* split = app.add_subcommand("split", "Stratified train/dev/test split");
  add_gold_options(split, gin, false);
  split->add_option("--seed", seed, "Random seed");
  split->add_option("--fractions", fractions, "Train, dev and test fractions")
      ->expected(3)
      ->delimiter(',');
  split->add_option("--out", out_path, "Splits file (JSON)")->required();
  split->callback([&] {
    action = [&] {
      Splits s = stratified_split(load_gold_input(gin), {fractions[0], fractions[1], fractions[2]},
                                  seed);
      save_splits(out_path, s);
      out << s.train.size() << "/" << s.dev.size() << "/" << s.test.size() << "\n";
      return kExitOk;
    };
  });

  // eval
  std::string pred_path, json_path;
  bool include_seed = false;
  RougeOptions ropt;
  auto* eval = app.add_subcommand("eval", "Score predictions against gold timelines");
  eval->require_subcommand(1);
  auto* extract = eval->add_subcommand("extract", "Average timeline-level accuracy");
  add_gold_options(extract, gin, true);
  extract->add_option("--pred", pred_path, "Predictions (JSON Lines)")->required();
  extract->add_flag("--include-seed", include_seed, "Score the seed tweet too");
  extract->add_option("--json", json_path, "Full report (JSON)");
  extract->callback([&] {
    action = [&] {
      auto golds = load_gold_input(gin);
      auto preds = load_extraction_predictions(pred_path);
      AccuracyReport r = timeline_accuracy(preds, golds, {include_seed});
      out << format_accuracy_row(fs::path(pred_path).stem().string(), r) << "\n";
      if (!json_path.empty()) write_file(json_path, dump_json(to_json(r)));
      return kExitOk;
    };
  });
  auto* summarize = eval->add_subcommand("summarize", "Multi-reference ROUGE F1");
  add_gold_options(summarize, gin, true);
  summarize->add_option("--pred", pred_path, "Predictions (JSON Lines)")->required();
  summarize->add_flag("--stem", ropt.stem, "Stem tokens");
  summarize->add_flag("--remove-stopwords", ropt.remove_stopwords, "Drop stopwords");
  summarize->add_flag("--mean-references", ropt.mean_over_references,
                      "Average over references instead of taking the best");
  summarize->add_option("--json", json_path, "Full report (JSON)");
  summarize->callback([&] {
    action = [&] {
      auto golds = load_gold_input(gin);
      auto preds = load_summary_predictions(pred_path);
      RougeReport r = summarization_report(preds, golds, ropt);
      out << format_rouge_row(fs::path(pred_path).stem().string(), r) << "\n";
      if (!json_path.empty()) write_file(json_path, dump_json(to_json(r)));
      return kExitOk;
    };
  });

  // baseline
  std::string mode, train_split = "train";
  auto* baseline = app.add_subcommand("baseline", "Naive baseline predictions");
  add_gold_options(baseline, gin, true);
  baseline->add_option("--mode", mode, "majority, first, last or random")
      ->required()
      ->check(CLI::IsMember({"majority", "first", "last", "random"}));
  baseline->add_option("--seed", seed, "Seed for the random mode");
  baseline->add_option("--train-split", train_split, "Split the majority label is learned from");
  baseline->add_option("--out", out_path, "Predictions (JSON Lines)")->required();
  baseline->callback([&] {
    action = [&] {
      auto golds = load_gold_input(gin);
      if (mode == "majority") {
        GoldInput train_in = gin;
        train_in.split = gin.splits.empty() ? "" : train_split;
        auto train = load_gold_input(train_in);
        bool label = majority_class_label(train);
        save_extraction_predictions(out_path, constant_predictions(golds, label));
        out << "majority label: " << (label ? "in" : "out") << "\n";
      } else {
        SummaryMode m = parse_summary_mode(mode);
        std::vector<SummaryPrediction> preds;
        for (const auto& g : golds) preds.push_back(naive_summary(g, m, seed));
        save_summary_predictions(out_path, preds);
      }
      out << golds.size() << " timelines\n";
      return kExitOk;
    };
  });

  // mann-whitney
  std::string sample_a, sample_b;
  auto* mwu = app.add_subcommand("mann-whitney", "One-sided Mann-Whitney U test (a > b)");
  mwu->add_option("--a", sample_a, "Comma-separated sample")->required();
  mwu->add_option("--b", sample_b, "Comma-separated sample")->required();
  mwu->callback([&] {
    action = [&] {
      auto a = parse_doubles(sample_a);
      auto b = parse_doubles(sample_b);
      MannWhitneyResult r = mann_whitney_u(a, b);
      out << json{{"u", r.u}, {"u_other", r.u_other}, {"p", r.p}, {"exact", r.exact}}.dump()
          << "\n";
      return kExitOk;
    };
  });

  // serve
  std::string data_dir, host = "127.0.0.1";
  int port = 8080;
  std::vector<std::string> tokens;
  auto* serve = app.add_subcommand("serve", "Run the review service");
  serve->add_option("--data", data_dir, "Data directory")->required();
  serve->add_option("--port", port, "TCP port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--token", tokens, "Accepted bearer token (repeatable)");
  serve->callback([&] { action = [&] { return run_serve(data_dir, host, port, tokens, out); }; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (!action) {
    err << "error: missing subcommand\n";
    return kExitUsage;
  }
  try {
    return action();
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
  } catch (const ValidationError& e) {
    err << "data error: " << e.what() << "\n";
  } catch (const NotFoundError& e) {
    err << "data error: " << e.what() << "\n";
  } catch (const ConflictError& e) {
    err << "data error: " << e.what() << "\n";
  } catch (const StageError& e) {
    err << "data error: " << e.what() << "\n";
  } catch (const json::exception& e) {
    err << "data error: " << e.what() << "\n";
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitData;
}

}  // namespace crisistl
