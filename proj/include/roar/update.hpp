#pragma once

#include "roar/graph.hpp"
#include "roar/types.hpp"

namespace roar {

struct InsertReport {
  uint32_t id = 0;            // id assigned to the new vector
  bool fallback = false;      // no pool entry had a bipartite in-edge
  uint32_t anchor_query = 0;  // bridge query used (valid unless fallback)
};

/// Offline insertion through the saved bipartite graph. The new vector is
/// searched as a query; the nearest pool entry with a bipartite in-edge
/// supplies its nearest query node q, whose retained neighbors become the
/// pruning candidates for the new node (fulfill on). Reverse edges are
/// attempted into each selected neighbor under the 2m cap. query_out[q]
/// gains the new id. `queries` must be the construction query set the
/// bipartite graph was built from.
///
/// Callers must hold exclusive access to index, bipartite and base:
/// single writer, no concurrent searches.
InsertReport insert(RoarIndex& index, BipartiteGraph& bipartite, VectorSet& base,
                    const VectorSet& queries, const float* v, uint32_t search_l = 0);

enum class DeleteStatus { Deleted, AlreadyDeleted };

/// Tombstones the node. Adjacency is untouched: the node keeps routing
/// traffic but is excluded from results. Idempotent.
DeleteStatus remove(RoarIndex& index, uint32_t id);

}  // namespace roar
