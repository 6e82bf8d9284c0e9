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

// JSON over HTTP front end of the review store.
//
//   GET  /tasks?kind=&status=      task list
//   GET  /tasks/{id}
//   POST /tasks/{id}/decision      {"decision", "reviewer", "version"?}
//   POST /tasks/{id}/annotation    {"annotator", "labels", "summary", "version"?}
//   GET  /clusters, /clusters/{id} clusters with human merges applied
//   GET  /stats, /export/gold, /export/decisions
//
// Errors are {"code", "message", "field"?}. On start the data directory's
// merge_queue.json, timelines.json and clusters.json are imported when
// present, and service.json may list bearer tokens: {"tokens": [...]}.

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crisistl/review.hpp"

namespace crisistl {

struct HttpResponse {
  int status = 200;
  nlohmann::json body;
};

class ReviewService {
 public:
  struct Config {
    std::filesystem::path data_dir;
    /// Added to the tokens read from service.json. No tokens: no auth.
    std::vector<std::string> tokens;
    std::size_t snapshot_every = 1000;
    std::function<Timestamp()> clock;
  };

  /// Throws DataError when the directory is missing or a file is corrupt.
  explicit ReviewService(Config config);

  HttpResponse handle(const std::string& method, const std::string& path,
                      const std::multimap<std::string, std::string>& query,
                      const std::string& body, const std::string& authorization = {});

  ReviewStore& store() { return *store_; }
  std::size_t imported_tasks() const { return imported_; }

 private:
  HttpResponse route(const std::string& method, const std::string& path,
                     const std::multimap<std::string, std::string>& query,
                     const std::string& body);
  HttpResponse clusters(const std::optional<std::string>& id);

  Config config_;
  std::unique_ptr<ReviewStore> store_;
  std::optional<ClusterRun> run_;
  std::size_t imported_ = 0;
};

/// Error body for an exception, with the matching status code.
HttpResponse error_response(const std::exception& e);

/// Binds immediately (a busy port throws Error); port 0 picks a free one.
class ReviewHttpServer {
 public:
  ReviewHttpServer(ReviewService& service, const std::string& host, int port);
  ~ReviewHttpServer();

  int port() const { return port_; }
  /// Blocks until stop().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

}  // namespace crisistl
