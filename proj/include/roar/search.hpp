#pragma once

#include <optional>

#include "roar/graph.hpp"
#include "roar/types.hpp"

namespace roar {

enum class SearchMode {
  Online,        // results only
  Construction,  // also returns the converged pool as visited_list
};

struct SearchReport {
  std::vector<uint32_t> ids;    // ascending by distance, tombstones filtered
  std::vector<float> dists;
  uint32_t hops = 0;            // expanded nodes
  uint32_t visited = 0;         // distinct nodes whose distance was computed
  std::vector<uint32_t> visited_list;  // construction mode: final pool ids
  double latency_micros = 0.0;
};

/// Epoch-stamped visited marker, O(1) reset between queries.
class VisitedTable {
 public:
  explicit VisitedTable(size_t n = 0) : stamps_(n, 0) {}
  void reset(size_t n) {
    if (stamps_.size() < n) stamps_.assign(n, 0);
    if (++epoch_ == 0) {  // wrapped
      std::fill(stamps_.begin(), stamps_.end(), 0);
      epoch_ = 1;
    }
  }
  bool test_and_set(uint32_t id) {
    if (stamps_[id] == epoch_) return true;
    stamps_[id] = epoch_;
    return false;
  }

 private:
  std::vector<uint32_t> stamps_;
  uint32_t epoch_ = 0;
};

/// Best-first search from the medoid with a distance-ordered pool of
/// capacity l. Expands the closest unexpanded entry each hop, keeps nodes
/// that beat the pool's worst entry (or fill it), and stops when every
/// pool entry is expanded. Pool ties break by smaller id. Tombstoned
/// nodes route but never appear in results.
SearchReport beam_search(const RoarIndex& index, const VectorSet& base, const float* query,
                         uint32_t l, uint32_t k, SearchMode mode = SearchMode::Online,
                         VisitedTable* scratch = nullptr);

/// Beam search over the bipartite graph stage: expanding a base node
/// steps through its query in-edges to their retained base neighbors.
SearchReport beam_search_bipartite(const BipartiteGraph& bipartite, const VectorSet& base,
                                   uint32_t entry, const float* query, uint32_t l, uint32_t k,
                                   VisitedTable* scratch = nullptr);

struct BatchResult {
  std::vector<SearchReport> reports;
  double mean_recall = 0.0;  // -1 when no ground truth given
  double qps = 0.0;
  double mean_hops = 0.0;
  double mean_visited = 0.0;
};

/// Searches every query; per-query results match serial beam_search for
/// any thread count. mean_recall compares against gt when provided.
BatchResult batch_search(const RoarIndex& index, const VectorSet& base,
                         const VectorSet& queries, uint32_t l, uint32_t k, int threads = 1,
                         const GroundTruth* gt = nullptr);

/// Bipartite-stage counterpart, for stage ablations.
BatchResult batch_search_bipartite(const BipartiteGraph& bipartite, const VectorSet& base,
                                   uint32_t entry, const VectorSet& queries, uint32_t l,
                                   uint32_t k, int threads = 1,
                                   const GroundTruth* gt = nullptr);

}  // namespace roar
