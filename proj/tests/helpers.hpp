#pragma once

// Test-only oracles and fixtures. Everything here re-derives expected
// behavior independently of the library implementation it checks:
// naive double-loop knn, a quadratic pruning-rule checker, BFS
// reachability, and deterministic random data.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <unistd.h>
#include <vector>

#include "roar/build.hpp"
#include "roar/distance.hpp"
#include "roar/graph.hpp"
#include "roar/types.hpp"

namespace testutil {

inline roar::VectorSet random_set(size_t count, uint32_t dim, uint64_t seed,
                                  roar::Metric metric = roar::Metric::L2) {
  roar::VectorSet set(dim, count, metric);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> uni(-1.0f, 1.0f);
  for (float& v : set.data) v = uni(rng);
  if (metric == roar::Metric::Cosine) set.normalize_rows();
  return set;
}

inline roar::VectorSet from_rows(std::vector<std::vector<float>> rows,
                                 roar::Metric metric = roar::Metric::L2) {
  roar::VectorSet set(uint32_t(rows.at(0).size()), rows.size(), metric);
  for (size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i].begin(), rows[i].end(), set.row(i));
  }
  return set;
}

// Naive double-loop exact knn with the (dist, id) tie rule.
inline std::vector<std::pair<float, uint32_t>> naive_knn(const roar::VectorSet& base,
                                                         const float* query, uint32_t k) {
  std::vector<std::pair<float, uint32_t>> all;
  for (size_t i = 0; i < base.count; ++i) {
    all.emplace_back(roar::dist(base.metric, query, base.row(i), base.dim), uint32_t(i));
  }
  std::sort(all.begin(), all.end());
  all.resize(std::min<size_t>(k, all.size()));
  return all;
}

// Quadratic re-derivation of the diversity rule: first candidate always
// accepted, candidate c accepted iff dist(pivot,c) < dist(c,p) for every
// earlier accepted p; stop at m; fulfill appends the rest in order.
inline std::vector<uint32_t> rule_check_acquire(const roar::VectorSet& base,
                                                std::span<const roar::Neighbor> candidates,
                                                uint32_t m, bool fulfill) {
  std::vector<uint32_t> accepted;
  for (const roar::Neighbor& c : candidates) {
    if (accepted.size() >= m) break;
    if (accepted.empty()) {
      accepted.push_back(c.id);
      continue;
    }
    bool ok = true;
    for (uint32_t p : accepted) {
      float d_cp = roar::dist(base.metric, base.row(c.id), base.row(p), base.dim);
      if (!(c.dist < d_cp)) {
        ok = false;
        break;
      }
    }
    if (ok) accepted.push_back(c.id);
  }
  if (fulfill) {
    for (const roar::Neighbor& c : candidates) {
      if (accepted.size() >= m) break;
      if (std::find(accepted.begin(), accepted.end(), c.id) == accepted.end()) {
        accepted.push_back(c.id);
      }
    }
  }
  return accepted;
}

inline std::vector<roar::Neighbor> sorted_candidates(const roar::VectorSet& base,
                                                     const float* pivot,
                                                     const std::vector<uint32_t>& ids) {
  std::vector<roar::Neighbor> out;
  for (uint32_t id : ids) {
    out.push_back({id, roar::dist(base.metric, pivot, base.row(id), base.dim)});
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline size_t bfs_reachable(const std::vector<std::vector<uint32_t>>& adj, uint32_t from) {
  std::vector<uint8_t> seen(adj.size(), 0);
  std::vector<uint32_t> stack{from};
  seen[from] = 1;
  size_t n = 1;
  while (!stack.empty()) {
    uint32_t v = stack.back();
    stack.pop_back();
    for (uint32_t nb : adj[v]) {
      if (!seen[nb]) {
        seen[nb] = 1;
        ++n;
        stack.push_back(nb);
      }
    }
  }
  return n;
}

// Directed hop count from `from` to `to`, or -1 when unreachable.
inline int bfs_hops(const std::vector<std::vector<uint32_t>>& adj, uint32_t from, uint32_t to) {
  std::vector<int> depth(adj.size(), -1);
  std::vector<uint32_t> frontier{from};
  depth[from] = 0;
  size_t head = 0;
  while (head < frontier.size()) {
    uint32_t v = frontier[head++];
    if (v == to) return depth[v];
    for (uint32_t nb : adj[v]) {
      if (depth[nb] < 0) {
        depth[nb] = depth[v] + 1;
        frontier.push_back(nb);
      }
    }
  }
  return -1;
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<uint64_t> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("roar-test-" + std::to_string(::getpid()) + "-" + std::to_string(++counter));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::filesystem::path file(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::vector<char> slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline uint64_t fnv1a(const std::vector<char>& bytes) {
  uint64_t h = 1469598103934665603ull;
  for (char c : bytes) {
    h ^= uint8_t(c);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace testutil
