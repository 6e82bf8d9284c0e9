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

#include <thread>

#include "httplib.h"

#include "crisistl/config.hpp"
#include "crisistl/error.hpp"
#include "crisistl/pipeline.hpp"
#include "crisistl_tools/review_http.hpp"
#include "helpers.hpp"
#include "timeline_builders.hpp"

using namespace crisistl;
using nlohmann::json;

namespace {

// Data directory with the pipeline fixture's clusters, one merge candidate
// and one noisy timeline per cluster.
void seed_data_dir(const std::filesystem::path& dir, bool with_tokens) {
  auto cfg = load_pipeline_config(testutil::fixture("pipeline/config.toml"));
  PipelineResources res(cfg);
  auto stream = load_stream(testutil::fixture("pipeline/stream.jsonl"));
  auto r = run_pipeline(stream, cfg, res.plugs());
  ClusterRun run{cfg.clustering, r.clusters, r.assignment_log, r.merge_log};
  save_cluster_run(dir / "clusters.json", run);
  std::vector<MergeCandidate> q{
      {"c000001", "c000002", 0.85, MergeDecision::kPending, std::nullopt}};
  save_merge_queue(dir / "merge_queue.json", q);
  json ts = json::array();
  for (const auto& t : noisy_timelines(run)) ts.push_back(to_json(t));
  write_file(dir / "timelines.json", ts.dump(2));
  if (with_tokens) write_file(dir / "service.json", R"({"tokens": ["s3cret"]})");
}

ReviewService::Config service_config(const std::filesystem::path& dir) {
  ReviewService::Config c;
  c.data_dir = dir;
  c.clock = [] { return testutil::at("2021-08-16T00:00:00Z"); };
  return c;
}

json annotation_body(const std::vector<std::string>& ids, const std::string& who,
                     std::size_t out_index, bool with_reason) {
  json labels = json::object();
  for (std::size_t i = 1; i < ids.size(); ++i) {
    if (i == out_index) {
      json l = {{"in_timeline", false}};
      if (with_reason) l["reason"] = "repetitive";
      labels[ids[i]] = l;
    } else {
      labels[ids[i]] = {{"in_timeline", true}};
    }
  }
  return {{"annotator", who}, {"labels", labels}, {"summary", "summary by " + who}};
}

}  // namespace

class ReviewServiceTest : public ::testing::Test {
 protected:
  void SetUp() override { seed_data_dir(dir_.path(), false); }
  HttpResponse get(ReviewService& s, const std::string& path,
                   std::multimap<std::string, std::string> q = {}) {
    return s.handle("GET", path, q, "");
  }
  HttpResponse post(ReviewService& s, const std::string& path, const json& body) {
    return s.handle("POST", path, {}, body.dump());
  }
  testutil::TempDir dir_;
};

TEST_F(ReviewServiceTest, ImportsQueuesOnce) {
  {
    ReviewService s(service_config(dir_.path()));
    EXPECT_EQ(s.imported_tasks(), 3u);
    auto r = get(s, "/tasks");
    ASSERT_EQ(r.status, 200);
    EXPECT_EQ(r.body.size(), 3u);
    auto merges = get(s, "/tasks", {{"kind", "merge_decision"}});
    EXPECT_EQ(merges.body.size(), 1u);
    EXPECT_EQ(get(s, "/tasks", {{"kind", "bogus"}}).status, 400);
  }
  ReviewService again(service_config(dir_.path()));
  EXPECT_EQ(again.imported_tasks(), 0u);
  EXPECT_EQ(get(again, "/tasks").body.size(), 3u);
}

TEST_F(ReviewServiceTest, MergeDecisionFlowsIntoClusters) {
  ReviewService s(service_config(dir_.path()));
  EXPECT_EQ(get(s, "/clusters").body.size(), 2u);
  auto task = get(s, "/tasks/m-c000001-c000002");
  ASSERT_EQ(task.status, 200);
  EXPECT_EQ(task.body["status"], "open");
  EXPECT_EQ(get(s, "/tasks/m-nope").status, 404);

  auto bad = post(s, "/tasks/m-c000001-c000002/decision", {{"decision", "maybe"}, {"reviewer", "ann"}});
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(bad.body["code"], "invalid");
  EXPECT_EQ(bad.body["field"], "decision");
  EXPECT_EQ(s.handle("POST", "/tasks/m-c000001-c000002/decision", {}, "{oops").status, 400);

  auto ok = post(s, "/tasks/m-c000001-c000002/decision",
                 {{"decision", "merged"}, {"reviewer", "ann"}, {"version", 0}});
  ASSERT_EQ(ok.status, 200) << ok.body.dump();
  EXPECT_EQ(ok.body["status"], "done");
  auto again = post(s, "/tasks/m-c000001-c000002/decision", {{"decision", "rejected"}, {"reviewer", "bo"}});
  EXPECT_EQ(again.status, 409);
  EXPECT_EQ(again.body["code"], "conflict");

  auto clusters = get(s, "/clusters");
  ASSERT_EQ(clusters.body.size(), 1u);
  EXPECT_EQ(clusters.body[0]["size"], 12);
  auto absorbed = get(s, "/clusters/c000002");
  ASSERT_EQ(absorbed.status, 200);
  EXPECT_EQ(absorbed.body["id"], "c000001");
  EXPECT_EQ(get(s, "/clusters/c000404").status, 404);

  auto decisions = get(s, "/export/decisions");
  ASSERT_EQ(decisions.body.size(), 1u);
  auto stats = get(s, "/stats");
  EXPECT_EQ(stats.body["tasks"]["merge_decision"]["done"], 1);
  EXPECT_EQ(get(s, "/nowhere").status, 404);
}

TEST_F(ReviewServiceTest, AnnotationsProduceGoldExport) {
  ReviewService s(service_config(dir_.path()));
  auto task = get(s, "/tasks/r-c000002");
  ASSERT_EQ(task.status, 200);
  std::vector<std::string> ids;
  for (const auto& t : task.body["timeline"]["tweets"]) ids.push_back(t["id"].get<std::string>());
  ASSERT_EQ(ids.size(), 5u);

  auto missing = post(s, "/tasks/r-c000002/annotation", annotation_body(ids, "ann", 2, false));
  EXPECT_EQ(missing.status, 400);
  EXPECT_EQ(missing.body["field"], "labels." + ids[2] + ".reason");

  EXPECT_EQ(post(s, "/tasks/r-c000002/annotation", annotation_body(ids, "ann", 2, true)).status, 200);
  EXPECT_EQ(post(s, "/tasks/r-c000002/annotation", annotation_body(ids, "ann", 3, true)).status, 409);
  EXPECT_EQ(post(s, "/tasks/r-c000002/annotation", annotation_body(ids, "bo", 2, true)).status, 200);
  EXPECT_TRUE(get(s, "/export/gold").body.empty());
  auto third = post(s, "/tasks/r-c000002/annotation", annotation_body(ids, "cy", 4, true));
  ASSERT_EQ(third.status, 200);
  EXPECT_EQ(third.body["status"], "done");

  auto gold = get(s, "/export/gold");
  ASSERT_EQ(gold.body.size(), 1u);
  const auto& labels = gold.body[0]["gold_labels"];
  EXPECT_EQ(labels[ids[1]], true);
  EXPECT_EQ(labels[ids[2]], false);
  EXPECT_EQ(labels[ids[3]], true);
  EXPECT_EQ(labels[ids[4]], true);
}

TEST(ReviewServiceAuth, BearerTokenRequired) {
  testutil::TempDir dir;
  seed_data_dir(dir.path(), true);
  ReviewService s(service_config(dir.path()));
  auto denied = s.handle("GET", "/tasks", {}, "");
  EXPECT_EQ(denied.status, 401);
  EXPECT_EQ(denied.body["code"], "unauthorized");
  EXPECT_EQ(s.handle("GET", "/tasks", {}, "", "Bearer wrong").status, 401);
  EXPECT_EQ(s.handle("GET", "/tasks", {}, "", "Bearer s3cret").status, 200);
}

TEST(ReviewServiceStartup, MissingDirectoryAndCorruptFiles) {
  testutil::TempDir dir;
  EXPECT_THROW(ReviewService(service_config(dir / "absent")), DataError);
  write_file(dir / "merge_queue.json", "[{");
  EXPECT_THROW(ReviewService(service_config(dir.path())), Error);
}

TEST(ReviewServiceStartup, NoClustersFileGives404) {
  testutil::TempDir dir;
  ReviewService s(service_config(dir.path()));
  EXPECT_EQ(s.handle("GET", "/clusters", {}, "").status, 404);
  EXPECT_EQ(s.handle("GET", "/tasks", {}, "").body, json::array());
}

TEST(ErrorResponse, StatusMapping) {
  EXPECT_EQ(error_response(ValidationError("bad", "f")).status, 400);
  EXPECT_EQ(error_response(ValidationError("bad", "f")).body["field"], "f");
  EXPECT_EQ(error_response(NotFoundError("x")).status, 404);
  EXPECT_EQ(error_response(ConflictError("x")).status, 409);
  EXPECT_EQ(error_response(std::runtime_error("x")).status, 500);
}

TEST(ReviewHttpServer, RealRoundTrip) {
  testutil::TempDir dir;
  seed_data_dir(dir.path(), true);
  ReviewService s(service_config(dir.path()));
  ReviewHttpServer server(s, "127.0.0.1", 0);
  ASSERT_GT(server.port(), 0);
  std::thread t([&] { server.run(); });

  httplib::Client client("127.0.0.1", server.port());
  client.set_connection_timeout(5);
  httplib::Headers auth{{"Authorization", "Bearer s3cret"}};
  httplib::Result res;
  for (int i = 0; i < 50; ++i) {
    res = client.Get("/stats", auth);
    if (res) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body)["tasks"]["merge_decision"]["open"], 1);

  auto unauth = client.Get("/tasks");
  ASSERT_TRUE(unauth);
  EXPECT_EQ(unauth->status, 401);

  auto filtered = client.Get("/tasks?kind=timeline_refine&status=open", auth);
  ASSERT_TRUE(filtered);
  EXPECT_EQ(json::parse(filtered->body).size(), 2u);

  auto post = client.Post("/tasks/m-c000001-c000002/decision", auth,
                          R"({"decision": "rejected", "reviewer": "ann"})", "application/json");
  ASSERT_TRUE(post);
  EXPECT_EQ(post->status, 200);
  EXPECT_EQ(json::parse(post->body)["merge"]["decision"], "rejected");

  // A second server on the same port must fail to bind.
  EXPECT_THROW(ReviewHttpServer(s, "127.0.0.1", server.port()), Error);

  server.stop();
  t.join();
}
