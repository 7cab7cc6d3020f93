#pragma once

#include <span>
#include <utility>

#include "roar/graph.hpp"
#include "roar/types.hpp"

namespace roar {

struct Neighbor {
  uint32_t id = 0;
  float dist = 0.0f;

  friend bool operator<(const Neighbor& a, const Neighbor& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.id < b.id;
  }
};

/// Diversity-pruned neighbor selection. `candidates` must be sorted
/// ascending by distance to the pivot and must not contain the pivot.
/// The closest candidate is always taken; each further candidate c is
/// accepted only if dist(pivot, c) < dist(c, p) for every already accepted
/// p, stopping at m. With `fulfill` set, rejected candidates are appended
/// in order afterwards until m neighbors or exhaustion. Output order is
/// acceptance order.
std::vector<uint32_t> acquire_neighbors(const VectorSet& base, const float* pivot,
                                        std::span<const Neighbor> candidates, uint32_t m,
                                        bool fulfill);

/// Builds the query-base bipartite graph from the per-query ground truth
/// (gt.k acts as Nq and must be >= 2). For each query: the closest base
/// node x gains the edge x -> t, the remaining Nq-1 neighbors become
/// query_out[t].
BipartiteGraph build_bipartite(const VectorSet& base, const GroundTruth& gt);

/// Collapses the bipartite graph onto base nodes. Every pivot (base node
/// with at least one bipartite out-edge) gathers candidates from its
/// bridge queries (nearest bridge first) up to l, prunes them with
/// fulfill on, then attempts reverse edges into each selected neighbor.
/// Nodes that never appear near a query stay isolated.
RoarIndex project(const BipartiteGraph& bipartite, const VectorSet& base, uint32_t m,
                  uint32_t l, int threads = 1);

/// Adds pruned supplementary edges: each node runs a beam search for
/// itself over a frozen copy of the projected graph, prunes the visited
/// pool (fulfill off), attempts reverse edges, and the final adjacency is
/// the per-node union of projected and supplementary lists capped at 2m
/// (farthest supplementary entries dropped first).
void enhance_connectivity(RoarIndex& index, const VectorSet& base, uint32_t m, uint32_t l,
                          int threads = 1);

/// End-to-end construction: exact ground truth at nq, bipartite build,
/// projection, connectivity enhancement. Deterministic for fixed inputs,
/// params and threads = 1.
std::pair<RoarIndex, BipartiteGraph> build_roargraph(const VectorSet& base,
                                                     const VectorSet& queries,
                                                     const BuildParams& params,
                                                     int threads = 1);

/// Same pipeline with the preprocessing step supplied by the caller
/// (gt.k must equal params.nq, rows aligned with the construction queries).
std::pair<RoarIndex, BipartiteGraph> build_roargraph(const VectorSet& base,
                                                     const GroundTruth& gt,
                                                     const BuildParams& params,
                                                     int threads = 1);

/// Query-agnostic comparator: identical pruning and enhancement passes,
/// but candidates come from each node's exact l nearest base neighbors
/// instead of the query distribution.
RoarIndex build_baseline_graph(const VectorSet& base, uint32_t m, uint32_t l,
                               int threads = 1);

/// Fraction of nodes reachable from the medoid by directed BFS.
double reachable_fraction(const RoarIndex& index);

}  // namespace roar
