#pragma once

#include <cstdint>
#include <vector>

#include "roar/types.hpp"

namespace roar {

/// Construction-time closeness map between query nodes and base nodes.
/// query_out[t]  : the retained nearest base ids of query t (its Nq nearest
///                 minus the single closest, kept in ascending-distance order).
/// base_out[x]   : query ids for which base node x was the closest neighbor.
/// No base-base or query-query edges exist by construction.
struct BipartiteGraph {
  std::vector<std::vector<uint32_t>> query_out;
  std::vector<std::vector<uint32_t>> base_out;
  // Distance from each base node to its base_out queries, recorded at
  // build time so projection can rank bridges nearest-first. Not
  // serialized; empty after load_index.
  std::vector<std::vector<float>> base_out_dist;

  size_t query_count() const { return query_out.size(); }
  size_t base_count() const { return base_out.size(); }
  bool empty() const { return query_out.empty() && base_out.empty(); }
};

struct BuildParams {
  uint32_t nq = 100;  // bipartite out-degree budget per query node
  uint32_t m = 35;    // per-list degree bound for projection and enhancement
  uint32_t l = 500;   // candidate pool size for pruning and build-time searches
};

/// Deletion markers. Tombstoned nodes keep their edges and still route
/// traffic; they are only filtered from search results.
struct Tombstones {
  std::vector<uint64_t> bits;
  size_t marked = 0;

  void resize(size_t n) { bits.resize((n + 63) / 64, 0); }
  bool test(uint32_t id) const { return (bits[id >> 6] >> (id & 63)) & 1; }
  void set(uint32_t id) {
    if (!test(id)) {
      bits[id >> 6] |= uint64_t(1) << (id & 63);
      ++marked;
    }
  }
  bool any() const { return marked > 0; }
};

/// Directed base-only proximity graph: per-node ordered neighbor lists,
/// a medoid entry point, and the parameters it was built with.
/// Out-degree never exceeds 2*m after the final merge.
struct RoarIndex {
  Metric metric = Metric::L2;
  uint32_t dim = 0;
  std::vector<std::vector<uint32_t>> adjacency;
  uint32_t medoid = 0;
  BuildParams params;
  Tombstones tombstones;

  size_t size() const { return adjacency.size(); }
  size_t live_count() const { return size() - tombstones.marked; }
};

}  // namespace roar
