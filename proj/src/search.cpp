#include <algorithm>
#include <chrono>
#include <cstring>

#include "roar/distance.hpp"
#include "roar/oracle.hpp"
#include "roar/parallel.hpp"
#include "roar/search.hpp"

namespace roar {

namespace {

struct PoolEntry {
  float dist;
  uint32_t id;
  bool expanded;
};

inline bool pool_less(float d, uint32_t id, const PoolEntry& e) {
  if (d != e.dist) return d < e.dist;
  return id < e.id;
}

// Fixed-capacity pool kept sorted ascending by (dist, id).
class Pool {
 public:
  explicit Pool(uint32_t capacity) : cap_(capacity) { entries_.reserve(capacity); }

  // Returns the insert position, or capacity if rejected.
  size_t insert(float d, uint32_t id) {
    size_t lo = 0, hi = entries_.size();
    while (lo < hi) {
      size_t mid = (lo + hi) / 2;
      if (pool_less(d, id, entries_[mid])) hi = mid;
      else lo = mid + 1;
    }
    if (lo >= cap_) return cap_;
    if (entries_.size() == cap_) entries_.pop_back();
    entries_.insert(entries_.begin() + lo, PoolEntry{d, id, false});
    return lo;
  }

  bool would_accept(float d, uint32_t id) const {
    if (entries_.size() < cap_) return true;
    return pool_less(d, id, entries_.back());
  }

  std::vector<PoolEntry>& entries() { return entries_; }
  const std::vector<PoolEntry>& entries() const { return entries_; }

 private:
  uint32_t cap_;
  std::vector<PoolEntry> entries_;
};

using Clock = std::chrono::steady_clock;

// Shared best-first loop; NeighborsFn(id) yields the out-edges of a node.
template <class NeighborsFn>
SearchReport beam_search_impl(const VectorSet& base, const Tombstones* tombstones,
                              uint32_t entry, const float* query, uint32_t l, uint32_t k,
                              SearchMode mode, VisitedTable* scratch,
                              NeighborsFn&& neighbors_of) {
  auto t0 = Clock::now();
  SearchReport report;
  VisitedTable local;
  VisitedTable& visited = scratch ? *scratch : local;
  visited.reset(base.count);

  const Metric metric = base.metric;
  const uint32_t dim = base.dim;
  Pool pool(l);

  visited.test_and_set(entry);
  pool.insert(dist(metric, query, base.row(entry), dim), entry);
  report.visited = 1;

  size_t cursor = 0;
  auto& entries = pool.entries();
  while (cursor < entries.size()) {
    if (!entries[cursor].expanded) {
      entries[cursor].expanded = true;
      ++report.hops;
      size_t lowest_insert = entries.size();
      for (uint32_t nb : neighbors_of(entries[cursor].id)) {
        if (visited.test_and_set(nb)) continue;
        float d = dist(metric, query, base.row(nb), dim);
        ++report.visited;
        if (!pool.would_accept(d, nb)) continue;
        size_t pos = pool.insert(d, nb);
        lowest_insert = std::min(lowest_insert, pos);
      }
      if (lowest_insert < cursor) cursor = lowest_insert;
    } else {
      ++cursor;
    }
  }

  for (const PoolEntry& e : entries) {
    if (report.ids.size() >= k) break;
    if (tombstones && tombstones->test(e.id)) continue;
    report.ids.push_back(e.id);
    report.dists.push_back(e.dist);
  }
  if (mode == SearchMode::Construction) {
    report.visited_list.reserve(entries.size());
    for (const PoolEntry& e : entries) report.visited_list.push_back(e.id);
  }
  report.latency_micros =
      std::chrono::duration<double, std::micro>(Clock::now() - t0).count();
  return report;
}

}  // namespace

SearchReport beam_search(const RoarIndex& index, const VectorSet& base, const float* query,
                         uint32_t l, uint32_t k, SearchMode mode, VisitedTable* scratch) {
  if (index.size() == 0) throw InvalidArgument("beam_search: empty index");
  if (k < 1 || k > l) throw InvalidArgument("beam_search: require 1 <= k <= l");
  if (index.size() != base.count) throw InvalidArgument("beam_search: index/base size mismatch");
  return beam_search_impl(base, &index.tombstones, index.medoid, query, l, k, mode, scratch,
                          [&](uint32_t id) -> const std::vector<uint32_t>& {
                            return index.adjacency[id];
                          });
}

SearchReport beam_search_bipartite(const BipartiteGraph& bipartite, const VectorSet& base,
                                   uint32_t entry, const float* query, uint32_t l, uint32_t k,
                                   VisitedTable* scratch) {
  if (base.count == 0) throw InvalidArgument("beam_search_bipartite: empty base");
  if (k < 1 || k > l) throw InvalidArgument("beam_search_bipartite: require 1 <= k <= l");
  if (bipartite.base_count() != base.count) {
    throw InvalidArgument("beam_search_bipartite: bipartite/base size mismatch");
  }
  // Expansion steps base -> query -> base; the flattened two-hop list is
  // materialized per expanded node.
  std::vector<uint32_t> two_hop;
  return beam_search_impl(base, nullptr, entry, query, l, k, SearchMode::Online, scratch,
                          [&](uint32_t id) -> const std::vector<uint32_t>& {
                            two_hop.clear();
                            for (uint32_t q : bipartite.base_out[id]) {
                              const auto& out = bipartite.query_out[q];
                              two_hop.insert(two_hop.end(), out.begin(), out.end());
                            }
                            return two_hop;
                          });
}

namespace {

template <class SearchFn>
BatchResult batch_impl(const VectorSet& queries, uint32_t k, int threads,
                       const GroundTruth* gt, SearchFn&& search_one) {
  BatchResult out;
  out.reports.resize(queries.count);
  auto t0 = Clock::now();
  parallel_for(0, queries.count, threads, [&](size_t q) { out.reports[q] = search_one(q); });
  double wall_secs = std::chrono::duration<double>(Clock::now() - t0).count();
  out.qps = wall_secs > 0 ? double(queries.count) / wall_secs : 0.0;

  double recall_sum = 0.0, hops_sum = 0.0, visited_sum = 0.0;
  for (size_t q = 0; q < queries.count; ++q) {
    const SearchReport& r = out.reports[q];
    hops_sum += r.hops;
    visited_sum += r.visited;
    if (gt) recall_sum += recall_at_k(r.ids, gt->ids_row(q), k);
  }
  size_t n = std::max<size_t>(queries.count, 1);
  out.mean_hops = hops_sum / double(n);
  out.mean_visited = visited_sum / double(n);
  out.mean_recall = gt ? recall_sum / double(n) : -1.0;
  return out;
}

}  // namespace

BatchResult batch_search(const RoarIndex& index, const VectorSet& base,
                         const VectorSet& queries, uint32_t l, uint32_t k, int threads,
                         const GroundTruth* gt) {
  if (queries.dim != base.dim) throw InvalidArgument("batch_search: dimension mismatch");
  if (gt && gt->query_count != queries.count) {
    throw InvalidArgument("batch_search: ground truth row count mismatch");
  }
  if (gt && gt->k < k) throw InvalidArgument("batch_search: ground truth k too small");
  return batch_impl(queries, k, threads, gt, [&](size_t q) {
    return beam_search(index, base, queries.row(q), l, k);
  });
}

BatchResult batch_search_bipartite(const BipartiteGraph& bipartite, const VectorSet& base,
                                   uint32_t entry, const VectorSet& queries, uint32_t l,
                                   uint32_t k, int threads, const GroundTruth* gt) {
  if (queries.dim != base.dim) throw InvalidArgument("batch_search: dimension mismatch");
  if (gt && gt->query_count != queries.count) {
    throw InvalidArgument("batch_search: ground truth row count mismatch");
  }
  if (gt && gt->k < k) throw InvalidArgument("batch_search: ground truth k too small");
  return batch_impl(queries, k, threads, gt, [&](size_t q) {
    return beam_search_bipartite(bipartite, base, entry, queries.row(q), l, k);
  });
}

}  // namespace roar
