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

#include <gtest/gtest.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "crisistl/config.hpp"
#include "crisistl/evaluation.hpp"
#include "crisistl_tools/cli.hpp"
#include "helpers.hpp"
#include "timeline_builders.hpp"

using namespace crisistl;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fx(const std::string& rel) { return testutil::fixture(rel).string(); }

void write_golds(const std::filesystem::path& path) {
  std::vector<GoldTimeline> gs;
  for (int i = 0; i < 10; ++i) {
    std::vector<bool> in{true, i % 2 == 0, false, i % 3 == 0};
    gs.push_back(testutil::make_gold("g" + std::to_string(i), in,
                                     i < 5 ? Domain::kFire : Domain::kStorm));
  }
  save_golds(path, gs);
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({"ingest", "--stream", "x"}).code, kExitUsage);
  EXPECT_EQ(cli({"baseline", "--mode", "oracle", "--gold", "g", "--out", "o"}).code, kExitUsage);
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
}

TEST(Cli, DataErrors) {
  testutil::TempDir dir;
  auto r = cli({"ingest", "--stream", (dir / "missing.jsonl").string(), "--config",
                fx("pipeline/config.toml"), "--out", (dir / "o.jsonl").string()});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("data error"), std::string::npos);
  write_file(dir / "bad.jsonl", "{\"id\": 1}\n");
  EXPECT_EQ(cli({"ingest", "--stream", (dir / "bad.jsonl").string(), "--config",
                 fx("pipeline/config.toml"), "--out", (dir / "o.jsonl").string()})
                .code,
            kExitData);
  EXPECT_EQ(cli({"mann-whitney", "--a", "1,x", "--b", "2"}).code, kExitData);
}

TEST(Cli, IngestClusterRefineEndToEnd) {
  testutil::TempDir dir;
  auto filtered = (dir / "filtered.jsonl").string();
  auto r = cli({"ingest", "--stream", fx("pipeline/stream.jsonl"), "--config",
                fx("pipeline/config.toml"), "--out", filtered});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, "kept 12 of 12 tweets\n");

  auto c1 = (dir / "c1.json").string(), c2 = (dir / "c2.json").string();
  auto q = (dir / "queue.json").string();
  ASSERT_EQ(cli({"cluster", "--in", filtered, "--config", fx("pipeline/config.toml"), "--out", c1,
                 "--merge-queue", q})
                .code,
            kExitOk);
  ASSERT_EQ(cli({"cluster", "--in", filtered, "--config", fx("pipeline/config.toml"), "--out", c2})
                .code,
            kExitOk);
  EXPECT_EQ(read_file(c1), read_file(c2));
  EXPECT_EQ(json::parse(read_file(c1))["clusters"].size(), 2u);
  EXPECT_EQ(json::parse(read_file(q)), json::array());

  write_file(dir / "decisions.json",
             R"([{"cluster_a": "c000001", "cluster_b": "c000002", "head_similarity": 0.0,
                  "decision": "merged", "decided_by": "ann"}])");
  auto merged = (dir / "merged.json").string();
  auto applied = cli({"refine", "apply", "--clusters", c1, "--decisions",
                      (dir / "decisions.json").string(), "--out", merged, "--requeue",
                      (dir / "requeue.json").string()});
  ASSERT_EQ(applied.code, kExitOk) << applied.err;
  EXPECT_EQ(json::parse(read_file(merged))["clusters"].size(), 1u);

  auto tl = (dir / "timelines.json").string();
  auto ex = cli({"refine", "export-timelines", "--clusters", c1, "--out", tl});
  ASSERT_EQ(ex.code, kExitOk);
  EXPECT_EQ(ex.out, "2 timelines\n");
  EXPECT_EQ(load_timelines(tl).size(), 2u);

  write_file(dir / "dangling.json", R"([{"cluster_a": "c000001", "cluster_b": "c000099", "decision": "merged"}])");
  EXPECT_EQ(cli({"refine", "apply", "--clusters", c1, "--decisions", (dir / "dangling.json").string(),
                 "--out", merged})
                .code,
            kExitData);
}

TEST(Cli, EvaluationCommands) {
  testutil::TempDir dir;
  auto gold = (dir / "gold.json").string();
  write_golds(gold);

  auto splits = (dir / "splits.json").string();
  auto s = cli({"split", "--gold", gold, "--seed", "7", "--fractions", "0.6,0.2,0.2", "--out", splits});
  ASSERT_EQ(s.code, kExitOk) << s.err;
  EXPECT_EQ(s.out, "6/2/2\n");

  auto stats = cli({"stats", "--gold", gold});
  ASSERT_EQ(stats.code, kExitOk);
  EXPECT_NE(stats.out.find("\ntotal,10,50,"), std::string::npos) << stats.out;

  auto agree = cli({"agreement", "--gold", gold});
  ASSERT_EQ(agree.code, kExitOk) << agree.err;
  EXPECT_DOUBLE_EQ(json::parse(agree.out)["best_pair_agreement_percent"].get<double>(), 100.0);

  std::vector<GoldTimeline> golds = load_golds(gold);
  auto pred = (dir / "oracle.jsonl").string();
  save_extraction_predictions(pred, oracle_predictions(golds));
  auto e = cli({"eval", "extract", "--gold", gold, "--pred", pred});
  ASSERT_EQ(e.code, kExitOk) << e.err;
  EXPECT_EQ(e.out, "| oracle               | 100.00 |\n");

  auto maj = (dir / "majority.jsonl").string();
  auto b = cli({"baseline", "--mode", "majority", "--gold", gold, "--splits", splits, "--split",
                "dev", "--out", maj});
  ASSERT_EQ(b.code, kExitOk) << b.err;
  EXPECT_EQ(load_extraction_predictions(maj).size(), 2u);

  auto first = (dir / "first.jsonl").string();
  ASSERT_EQ(cli({"baseline", "--mode", "first", "--gold", gold, "--out", first}).code, kExitOk);
  auto rouge = cli({"eval", "summarize", "--gold", gold, "--pred", first, "--stem", "--json",
                    (dir / "rouge.json").string()});
  ASSERT_EQ(rouge.code, kExitOk) << rouge.err;
  EXPECT_EQ(rouge.out.rfind("| first ", 0), 0u);
  EXPECT_TRUE(json::parse(read_file(dir / "rouge.json")).is_object());

  auto mw = cli({"mann-whitney", "--a", "4,5,6", "--b", "1,2,3"});
  ASSERT_EQ(mw.code, kExitOk);
  auto j = json::parse(mw.out);
  EXPECT_DOUBLE_EQ(j["u"].get<double>(), 9.0);
  EXPECT_NEAR(j["p"].get<double>(), 0.05, 1e-12);
}
