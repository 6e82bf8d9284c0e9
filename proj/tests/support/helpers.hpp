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

#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "crisistl/clustering.hpp"
#include "crisistl/geo.hpp"
#include "crisistl/time.hpp"

namespace testutil {

inline std::filesystem::path fixture(const std::string& rel) {
  return std::filesystem::path(CRISISTL_FIXTURES) / rel;
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("crisistl-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline crisistl::Timestamp at(const std::string& rfc3339) {
  return crisistl::parse_rfc3339(rfc3339);
}

struct Place {
  std::string name;
  double lat;
  double lon;
  crisistl::Granularity granularity = crisistl::Granularity::kPoi;
};

/// Processed tweet built directly from entity surfaces and places.
inline crisistl::ProcessedTweet make_tweet(const std::string& id, const std::string& time,
                                           const std::vector<std::string>& entities,
                                           const std::vector<std::string>& hashtags = {},
                                           const std::vector<Place>& places = {}) {
  crisistl::ProcessedTweet t;
  t.raw.id = id;
  t.raw.time = at(time);
  std::string text;
  for (const auto& e : entities) {
    if (!text.empty()) text += " ";
    std::size_t b = text.size();
    text += e;
    t.entities.push_back({e, crisistl::EntityKind::kNounArgument, {b, text.size()}});
  }
  for (const auto& p : places) {
    if (!text.empty()) text += " ";
    std::size_t b = text.size();
    text += p.name;
    crisistl::EntityMention m{p.name, crisistl::EntityKind::kLocation, {b, text.size()}};
    t.entities.push_back(m);
    t.resolved.push_back({m, {p.name, {p.lat, p.lon}, p.granularity, "test"}, 1.0});
  }
  for (const auto& h : hashtags) {
    text += " #" + h;
    t.raw.hashtags.push_back(h);
  }
  t.raw.text = text;
  t.hashtags = t.raw.hashtags;
  return t;
}

inline crisistl::TweetPtr ptr(crisistl::ProcessedTweet t) {
  return std::make_shared<const crisistl::ProcessedTweet>(std::move(t));
}

}  // namespace testutil
