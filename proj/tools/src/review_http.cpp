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

#include "crisistl_tools/review_http.hpp"

#include <httplib.h>

#include <algorithm>

#include "crisistl/config.hpp"
#include "crisistl/error.hpp"
#include "crisistl/text.hpp"

namespace crisistl {

using nlohmann::json;

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : path) {
    if (c == '/') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::optional<std::string> query_value(const std::multimap<std::string, std::string>& q,
                                       const std::string& key) {
  auto it = q.find(key);
  if (it == q.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

json parse_body(const std::string& body) {
  try {
    json j = json::parse(body);
    if (!j.is_object()) throw ValidationError("request body must be a JSON object", "body");
    return j;
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("invalid JSON: ") + e.what(), "body");
  }
}

std::optional<std::uint64_t> expected_version(const json& body) {
  auto it = body.find("version");
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_unsigned()) throw ValidationError("must be a non-negative integer", "version");
  return it->get<std::uint64_t>();
}

json cluster_view(const Cluster& c) {
  json members = json::array();
  for (const auto& m : c.members) members.push_back(to_json(*m));
  return {{"id", c.id},
          {"domain", std::string(to_string(c.domain))},
          {"state", std::string(to_string(c.state))},
          {"last_update", format_rfc3339(c.last_update)},
          {"size", c.members.size()},
          {"head", c.head_tweet().id()},
          {"members", members}};
}

json task_list(const std::vector<ReviewTask>& tasks) {
  json arr = json::array();
  for (const auto& t : tasks) arr.push_back(to_json(t));
  return arr;
}

}  // namespace

HttpResponse error_response(const std::exception& e) {
  HttpResponse r;
  std::string code = "internal";
  r.status = 500;
  std::string message = e.what();
  json field;
  if (auto* v = dynamic_cast<const ValidationError*>(&e)) {
    r.status = 400;
    code = "invalid";
    message = v->bare_message();
    if (!v->field().empty()) field = v->field();
  } else if (dynamic_cast<const DataError*>(&e) || dynamic_cast<const json::exception*>(&e)) {
    r.status = 400;
    code = "invalid";
  } else if (dynamic_cast<const NotFoundError*>(&e)) {
    r.status = 404;
    code = "not_found";
  } else if (dynamic_cast<const ConflictError*>(&e)) {
    r.status = 409;
    code = "conflict";
  }
  r.body = {{"code", code}, {"message", message}};
  if (!field.is_null()) r.body["field"] = field;
  return r;
}

ReviewService::ReviewService(Config config) : config_(std::move(config)) {
  const auto& dir = config_.data_dir;
  if (dir.empty() || !std::filesystem::is_directory(dir)) {
    throw DataError("data directory '" + dir.string() + "' does not exist");
  }
  if (auto p = dir / "service.json"; std::filesystem::exists(p)) {
    try {
      json j = json::parse(read_file(p));
      for (const auto& t : j.value("tokens", json::array())) {
        config_.tokens.push_back(t.get<std::string>());
      }
    } catch (const json::exception& e) {
      throw DataError(p.string() + ": " + e.what());
    }
  }
  ReviewStore::Options opt;
  opt.data_dir = dir / "store";
  opt.snapshot_every = config_.snapshot_every;
  opt.clock = config_.clock;
  store_ = std::make_unique<ReviewStore>(opt);

  if (auto p = dir / "clusters.json"; std::filesystem::exists(p)) run_ = load_cluster_run(p);
  if (auto p = dir / "merge_queue.json"; std::filesystem::exists(p)) {
    for (const auto& c : load_merge_queue(p)) {
      if (store_->create_task(make_merge_task(c))) ++imported_;
    }
  }
  if (auto p = dir / "timelines.json"; std::filesystem::exists(p)) {
    for (const auto& t : load_timelines(p)) {
      if (store_->create_task(make_refine_task(t))) ++imported_;
    }
  }
}

HttpResponse ReviewService::handle(const std::string& method, const std::string& path,
                                   const std::multimap<std::string, std::string>& query,
                                   const std::string& body, const std::string& authorization) {
  if (!config_.tokens.empty()) {
    const std::string prefix = "Bearer ";
    bool ok = authorization.rfind(prefix, 0) == 0 &&
              std::find(config_.tokens.begin(), config_.tokens.end(),
                        authorization.substr(prefix.size())) != config_.tokens.end();
    if (!ok) return {401, {{"code", "unauthorized"}, {"message", "missing or unknown bearer token"}}};
  }
  try {
    return route(method, path, query, body);
  } catch (const std::exception& e) {
    return error_response(e);
  }
}

HttpResponse ReviewService::route(const std::string& method, const std::string& path,
                                  const std::multimap<std::string, std::string>& query,
                                  const std::string& body) {
  auto parts = split_path(path);
  auto not_found = [&]() -> HttpResponse {
    return {404, {{"code", "not_found"}, {"message", "no route for " + method + " " + path}}};
  };
  if (parts.empty()) return not_found();
  const std::string& root = parts[0];
  if (method == "GET") {
    if (root == "tasks" && parts.size() == 1) {
      std::optional<TaskKind> kind;
      std::optional<TaskStatus> status;
      if (auto k = query_value(query, "kind")) kind = parse_task_kind(*k);
      if (auto s = query_value(query, "status")) status = parse_task_status(*s);
      return {200, task_list(store_->list(kind, status))};
    }
    if (root == "tasks" && parts.size() == 2) return {200, to_json(store_->get(parts[1]))};
    if (root == "clusters" && parts.size() == 1) return clusters(std::nullopt);
    if (root == "clusters" && parts.size() == 2) return clusters(parts[1]);
    if (root == "stats" && parts.size() == 1) return {200, store_->stats_json()};
    if (root == "export" && parts.size() == 2 && parts[1] == "gold") {
      json arr = json::array();
      for (const auto& g : store_->gold()) arr.push_back(to_json(g));
      return {200, arr};
    }
    if (root == "export" && parts.size() == 2 && parts[1] == "decisions") {
      return {200, merge_queue_to_json(store_->decisions())};
    }
    return not_found();
  }
  if (method == "POST" && root == "tasks" && parts.size() == 3) {
    const std::string& id = parts[1];
    json j = parse_body(body);
    if (parts[2] == "decision") {
      auto d = j.find("decision");
      if (d == j.end() || !d->is_string()) throw ValidationError("must be a string", "decision");
      MergeDecision decision;
      try {
        decision = parse_merge_decision(d->get<std::string>());
      } catch (const Error& e) {
        throw ValidationError(e.what(), "decision");
      }
      auto r = j.find("reviewer");
      if (r == j.end() || !r->is_string()) throw ValidationError("must be a string", "reviewer");
      return {200, to_json(store_->submit_decision(id, decision, r->get<std::string>(),
                                                   expected_version(j)))};
    }
    if (parts[2] == "annotation") {
      AnnotationSet a = annotation_from_json(j);
      return {200, to_json(store_->submit_annotation(id, a, expected_version(j)))};
    }
  }
  return not_found();
}

HttpResponse ReviewService::clusters(const std::optional<std::string>& id) {
  if (!run_) throw NotFoundError("no clusters.json in the data directory");
  auto decisions = store_->decisions();
  RefineOutcome out = apply_decisions(*run_, decisions);
  if (!id) {
    json arr = json::array();
    for (const auto& c : out.run.clusters) arr.push_back(cluster_view(c));
    return {200, arr};
  }
  // An absorbed id resolves to the cluster that now holds its members.
  const Cluster* original = nullptr;
  for (const auto& c : run_->clusters) {
    if (c.id == *id) original = &c;
  }
  if (!original) throw NotFoundError("cluster '" + *id + "' not found");
  const std::string& probe = original->members.front()->id();
  for (const auto& c : out.run.clusters) {
    for (const auto& m : c.members) {
      if (m->id() == probe) return {200, cluster_view(c)};
    }
  }
  throw Error("cluster '" + *id + "' lost its members");
}

struct ReviewHttpServer::Impl {
  httplib::Server server;
};

ReviewHttpServer::ReviewHttpServer(ReviewService& service, const std::string& host, int port)
    : impl_(std::make_unique<Impl>()) {
  auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
    std::multimap<std::string, std::string> query(req.params.begin(), req.params.end());
    HttpResponse r = service.handle(req.method, req.path, query, req.body,
                                    req.get_header_value("Authorization"));
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  // No SO_REUSEPORT, so a busy port fails to bind.
  impl_->server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  impl_->server.Get(".*", handler);
  impl_->server.Post(".*", handler);
  if (port == 0) {
    port_ = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, port)) {
    port_ = port;
  } else {
    port_ = -1;
  }
  if (port_ <= 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
}

ReviewHttpServer::~ReviewHttpServer() { stop(); }

void ReviewHttpServer::run() { impl_->server.listen_after_bind(); }

void ReviewHttpServer::stop() { impl_->server.stop(); }

}  // namespace crisistl
