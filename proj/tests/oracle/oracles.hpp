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

// Slow reference implementations used by the tests. None of them shares
// code with the library.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

/// True when `sub` is a subsequence of `seq`.
template <typename Seq>
bool is_subsequence(const Seq& sub, const Seq& seq) {
  std::size_t j = 0;
  for (std::size_t i = 0; i < seq.size() && j < sub.size(); ++i) {
    if (seq[i] == sub[j]) ++j;
  }
  return j == sub.size();
}

/// Longest common subsequence by enumerating subsequences of the shorter
/// input, longest first.
template <typename Seq>
std::size_t brute_lcs(const Seq& a, const Seq& b) {
  const Seq& s = a.size() <= b.size() ? a : b;
  const Seq& l = a.size() <= b.size() ? b : a;
  const std::size_t n = s.size();
  std::vector<std::vector<std::uint32_t>> by_count(n + 1);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    by_count[static_cast<std::size_t>(__builtin_popcount(mask))].push_back(mask);
  }
  for (std::size_t k = n + 1; k-- > 0;) {
    for (std::uint32_t mask : by_count[k]) {
      Seq sub;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (1u << i)) sub.push_back(s[i]);
      }
      if (is_subsequence(sub, l)) return k;
    }
  }
  return 0;
}

inline double law_of_cosines_km(double lat1, double lon1, double lat2, double lon2) {
  constexpr double kR = 6371.0088;
  constexpr double kPi = 3.14159265358979323846;
  double f1 = lat1 * kPi / 180.0, f2 = lat2 * kPi / 180.0;
  double dl = (lon2 - lon1) * kPi / 180.0;
  double c = std::sin(f1) * std::sin(f2) + std::cos(f1) * std::cos(f2) * std::cos(dl);
  return kR * std::acos(std::clamp(c, -1.0, 1.0));
}

/// Best total score over every one-to-one matching of rows to columns with
/// at most `k` pairs; zero-score cells never pair.
inline double exhaustive_matching(const std::vector<std::vector<double>>& score, std::size_t k) {
  std::size_t rows = score.size();
  std::size_t cols = rows ? score[0].size() : 0;
  double best = 0.0;
  std::vector<bool> used(cols, false);
  std::function<void(std::size_t, std::size_t, double)> go = [&](std::size_t r, std::size_t pairs,
                                                                 double total) {
    best = std::max(best, total);
    if (r == rows || pairs == k) return;
    go(r + 1, pairs, total);
    for (std::size_t c = 0; c < cols; ++c) {
      if (used[c] || score[r][c] <= 0.0) continue;
      used[c] = true;
      go(r + 1, pairs + 1, total + score[r][c]);
      used[c] = false;
    }
  };
  go(0, 0, 0.0);
  return best;
}

/// Connected components of the graph on `nodes` with `edges`, each
/// component sorted, components ordered by their first element.
inline std::vector<std::vector<std::string>> components(
    const std::vector<std::string>& nodes,
    const std::vector<std::pair<std::string, std::string>>& edges) {
  std::map<std::string, std::string> parent;
  for (const auto& n : nodes) parent[n] = n;
  std::function<std::string(const std::string&)> find = [&](const std::string& x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (const auto& [a, b] : edges) {
    auto ra = find(a), rb = find(b);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& n : nodes) groups[find(n)].push_back(n);
  std::vector<std::vector<std::string>> out;
  for (auto& [root, g] : groups) {
    std::sort(g.begin(), g.end());
    out.push_back(g);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Clipped n-gram overlap counted by scanning candidate n-grams against a
/// multiset of reference n-grams.
inline double ngram_f1(const std::vector<std::string>& cand, const std::vector<std::string>& ref,
                       std::size_t n) {
  if (cand.size() < n || ref.size() < n) return 0.0;
  std::vector<std::vector<std::string>> pool;
  for (std::size_t i = 0; i + n <= ref.size(); ++i) {
    pool.emplace_back(ref.begin() + static_cast<long>(i), ref.begin() + static_cast<long>(i + n));
  }
  std::size_t hits = 0;
  std::size_t total = cand.size() - n + 1;
  for (std::size_t i = 0; i + n <= cand.size(); ++i) {
    std::vector<std::string> g(cand.begin() + static_cast<long>(i),
                               cand.begin() + static_cast<long>(i + n));
    auto it = std::find(pool.begin(), pool.end(), g);
    if (it != pool.end()) {
      ++hits;
      pool.erase(it);
    }
  }
  if (hits == 0) return 0.0;
  double p = static_cast<double>(hits) / static_cast<double>(total);
  double r = static_cast<double>(hits) / static_cast<double>(ref.size() - n + 1);
  return 2 * p * r / (p + r);
}

/// One-sided Mann-Whitney p-value P(U >= u_obs) by enumerating every
/// assignment of the pooled values to the first sample.
inline std::pair<double, double> mann_whitney_enumerate(const std::vector<double>& a,
                                                        const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = a.size(), total = pooled.size();
  auto u_of = [&](const std::vector<bool>& in_a) {
    double u = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
      if (!in_a[i]) continue;
      for (std::size_t j = 0; j < total; ++j) {
        if (in_a[j]) continue;
        if (pooled[i] > pooled[j]) u += 1.0;
        if (pooled[i] == pooled[j]) u += 0.5;
      }
    }
    return u;
  };
  std::vector<bool> obs(total, false);
  std::fill(obs.begin(), obs.begin() + static_cast<long>(n), true);
  double u_obs = u_of(obs);
  std::vector<bool> pick(total, false);
  std::fill(pick.end() - static_cast<long>(n), pick.end(), true);
  std::size_t count = 0, hits = 0;
  do {
    ++count;
    if (u_of(pick) >= u_obs - 1e-9) ++hits;
  } while (std::next_permutation(pick.begin(), pick.end()));
  return {u_obs, static_cast<double>(hits) / static_cast<double>(count)};
}

}  // namespace oracle
