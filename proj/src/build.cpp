#include <algorithm>
#include <mutex>
#include <numeric>

#include "roar/build.hpp"
#include "roar/distance.hpp"
#include "roar/oracle.hpp"
#include "roar/parallel.hpp"
#include "roar/search.hpp"

namespace roar {

std::vector<uint32_t> acquire_neighbors(const VectorSet& base, const float* pivot,
                                        std::span<const Neighbor> candidates, uint32_t m,
                                        bool fulfill) {
  if (m < 1) throw InvalidArgument("acquire_neighbors: m must be >= 1");
  std::vector<uint32_t> result;
  if (candidates.empty()) return result;
  result.reserve(m);

  const Metric metric = base.metric;
  const uint32_t dim = base.dim;
  result.push_back(candidates[0].id);
  for (size_t i = 1; i < candidates.size() && result.size() < m; ++i) {
    const Neighbor& c = candidates[i];
    bool diverse = true;
    for (uint32_t p : result) {
      // c is dominated if some accepted neighbor sits closer to it than
      // the pivot does
      if (dist(metric, base.row(c.id), base.row(p), dim) <= c.dist) {
        diverse = false;
        break;
      }
    }
    if (diverse) result.push_back(c.id);
  }
  if (fulfill && result.size() < m) {
    for (const Neighbor& c : candidates) {
      if (result.size() >= m) break;
      if (std::find(result.begin(), result.end(), c.id) == result.end()) {
        result.push_back(c.id);
      }
    }
  }
  return result;
}

BipartiteGraph build_bipartite(const VectorSet& base, const GroundTruth& gt) {
  if (gt.k < 2) throw InvalidArgument("build_bipartite: nq must be >= 2");
  BipartiteGraph bip;
  bip.query_out.resize(gt.query_count);
  bip.base_out.resize(base.count);
  bip.base_out_dist.resize(base.count);
  for (size_t t = 0; t < gt.query_count; ++t) {
    auto row = gt.ids_row(t);
    auto dists = gt.dists_row(t);
    for (uint32_t j = 0; j < gt.k; ++j) {
      if (size_t(row[j]) >= base.count) {
        throw InvalidArgument("build_bipartite: ground-truth id out of range");
      }
      if (j + 1 < gt.k && dists[j] > dists[j + 1]) {
        throw InvalidArgument("build_bipartite: ground-truth row not sorted");
      }
    }
    uint32_t closest = row[0];
    bip.base_out[closest].push_back(uint32_t(t));
    bip.base_out_dist[closest].push_back(dists[0]);
    auto& out = bip.query_out[t];
    out.assign(row.begin() + 1, row.end());
  }
  return bip;
}

namespace {

// Sorted candidate list for a pivot, distances included.
std::vector<Neighbor> to_candidates(const VectorSet& base, const float* pivot,
                                    std::span<const uint32_t> ids) {
  std::vector<Neighbor> cands;
  cands.reserve(ids.size());
  for (uint32_t id : ids) {
    cands.push_back(Neighbor{id, dist(base.metric, pivot, base.row(id), base.dim)});
  }
  std::sort(cands.begin(), cands.end());
  return cands;
}

// Reverse-edge attempt: re-prunes p's current list with `candidate` added,
// fulfill off. The caller provides the per-node lock when parallel.
void reverse_attempt(std::vector<std::vector<uint32_t>>& adjacency, const VectorSet& base,
                     uint32_t p, uint32_t candidate, uint32_t m, std::mutex* lock) {
  std::unique_lock<std::mutex> guard;
  if (lock) guard = std::unique_lock<std::mutex>(*lock);
  auto& list = adjacency[p];
  if (std::find(list.begin(), list.end(), candidate) != list.end()) return;
  std::vector<uint32_t> ids(list.begin(), list.end());
  ids.push_back(candidate);
  std::vector<Neighbor> cands = to_candidates(base, base.row(p), ids);
  list = acquire_neighbors(base, base.row(p), cands, m, /*fulfill=*/false);
}

}  // namespace

RoarIndex project(const BipartiteGraph& bipartite, const VectorSet& base, uint32_t m,
                  uint32_t l, int threads) {
  if (bipartite.base_count() != base.count) {
    throw InvalidArgument("project: bipartite/base size mismatch");
  }
  RoarIndex index;
  index.metric = base.metric;
  index.dim = base.dim;
  index.params.m = m;
  index.params.l = l;
  index.adjacency.assign(base.count, {});
  index.tombstones.resize(base.count);
  if (base.count == 0) return index;
  index.medoid = medoid(base);

  std::vector<uint32_t> pivots;
  for (size_t x = 0; x < base.count; ++x) {
    if (!bipartite.base_out[x].empty()) pivots.push_back(uint32_t(x));
  }

  std::vector<std::mutex> locks(threads > 1 ? base.count : 0);
  auto lock_for = [&](uint32_t id) -> std::mutex* {
    return locks.empty() ? nullptr : &locks[id];
  };

  const bool have_bridge_dists = bipartite.base_out_dist.size() == base.count;
  parallel_for(0, pivots.size(), threads, [&](size_t pi) {
    uint32_t x = pivots[pi];
    const float* xv = base.row(x);

    // Bridges nearest-first (distance recorded at bipartite build time),
    // then their retained neighbors until the candidate budget is met.
    std::vector<Neighbor> bridges;
    const auto& bridge_ids = bipartite.base_out[x];
    for (size_t bi = 0; bi < bridge_ids.size(); ++bi) {
      float d = have_bridge_dists && bi < bipartite.base_out_dist[x].size()
                    ? bipartite.base_out_dist[x][bi]
                    : 0.0f;
      bridges.push_back(Neighbor{bridge_ids[bi], d});
    }
    std::sort(bridges.begin(), bridges.end());

    thread_local VisitedTable dedupe;
    dedupe.reset(base.count);
    dedupe.test_and_set(x);
    std::vector<uint32_t> gathered;
    for (const Neighbor& bridge : bridges) {
      if (gathered.size() >= l) break;
      for (uint32_t cand : bipartite.query_out[bridge.id]) {
        if (!dedupe.test_and_set(cand)) gathered.push_back(cand);
      }
    }
    std::vector<Neighbor> cands = to_candidates(base, xv, gathered);
    if (cands.size() > l) cands.resize(l);

    std::vector<uint32_t> selected =
        acquire_neighbors(base, xv, cands, m, /*fulfill=*/true);
    {
      std::unique_lock<std::mutex> guard;
      if (auto* mu = lock_for(x)) guard = std::unique_lock<std::mutex>(*mu);
      index.adjacency[x] = selected;
    }
    for (uint32_t p : selected) {
      reverse_attempt(index.adjacency, base, p, x, m, lock_for(p));
    }
  });
  return index;
}

void enhance_connectivity(RoarIndex& index, const VectorSet& base, uint32_t m, uint32_t l,
                          int threads) {
  size_t n = index.size();
  if (n == 0) return;
  if (n != base.count) throw InvalidArgument("enhance_connectivity: index/base size mismatch");

  // Searches run on a frozen copy; supplementary lists evolve separately.
  RoarIndex frozen;
  frozen.metric = index.metric;
  frozen.dim = index.dim;
  frozen.medoid = index.medoid;
  frozen.adjacency = index.adjacency;
  frozen.tombstones.resize(n);

  std::vector<std::vector<uint32_t>> selections(n);
  std::vector<std::mutex> locks(threads > 1 ? n : 0);
  auto lock_for = [&](uint32_t id) -> std::mutex* {
    return locks.empty() ? nullptr : &locks[id];
  };

  // Phase 1: forward selections from each node's own search, order-free
  // because only the frozen graph is read.
  uint32_t search_l = std::max<uint32_t>(l, 1);
  parallel_for(0, n, threads, [&](size_t xi) {
    uint32_t x = uint32_t(xi);
    thread_local VisitedTable scratch;
    SearchReport report = beam_search(frozen, base, base.row(x), search_l, 1,
                                      SearchMode::Construction, &scratch);
    std::vector<uint32_t> pool_ids;
    pool_ids.reserve(report.visited_list.size());
    for (uint32_t id : report.visited_list) {
      if (id != x) pool_ids.push_back(id);  // never self
    }
    std::vector<Neighbor> cands = to_candidates(base, base.row(x), pool_ids);
    selections[x] = acquire_neighbors(base, base.row(x), cands, m, /*fulfill=*/false);
  });

  // Phase 2: reverse attempts into every selected neighbor. Running this
  // after all selections exist keeps in-edges to late nodes from being
  // overwritten, which the reachability contract depends on.
  std::vector<std::vector<uint32_t>> supplementary = selections;
  parallel_for(0, n, threads, [&](size_t xi) {
    uint32_t x = uint32_t(xi);
    for (uint32_t p : selections[x]) {
      reverse_attempt(supplementary, base, p, x, m, lock_for(p));
    }
  });

  // Merge: projected edges first, then supplementary ones, duplicates
  // removed; overflow beyond 2m drops the farthest supplementary entries.
  uint32_t cap = 2 * m;
  parallel_for(0, n, threads, [&](size_t x) {
    auto& merged = index.adjacency[x];
    std::vector<uint32_t> extra;
    for (uint32_t id : supplementary[x]) {
      if (std::find(merged.begin(), merged.end(), id) == merged.end()) extra.push_back(id);
    }
    if (merged.size() + extra.size() > cap) {
      std::vector<Neighbor> ranked = to_candidates(base, base.row(x), extra);
      extra.clear();
      for (const Neighbor& nb : ranked) {
        if (merged.size() + extra.size() >= cap) break;
        extra.push_back(nb.id);
      }
    }
    merged.insert(merged.end(), extra.begin(), extra.end());
  });
}

namespace {

// Degenerate inputs (single vector, no queries): medoid-only index.
std::pair<RoarIndex, BipartiteGraph> trivial_index(const VectorSet& base, size_t query_count,
                                                   const BuildParams& params) {
  RoarIndex index;
  index.metric = base.metric;
  index.dim = base.dim;
  index.params = params;
  index.adjacency.assign(base.count, {});
  index.tombstones.resize(base.count);
  index.medoid = base.count ? medoid(base) : 0;
  BipartiteGraph bip;
  bip.query_out.resize(query_count);
  bip.base_out.resize(base.count);
  bip.base_out_dist.resize(base.count);
  return {std::move(index), std::move(bip)};
}

}  // namespace

std::pair<RoarIndex, BipartiteGraph> build_roargraph(const VectorSet& base,
                                                     const GroundTruth& gt,
                                                     const BuildParams& params,
                                                     int threads) {
  if (base.count < 2 || params.nq < 2) return trivial_index(base, gt.query_count, params);
  if (gt.k != params.nq) throw InvalidArgument("build_roargraph: gt.k must equal nq");
  BipartiteGraph bip = build_bipartite(base, gt);
  RoarIndex index = project(bip, base, params.m, params.l, threads);
  index.params = params;
  enhance_connectivity(index, base, params.m, params.l, threads);
  return {std::move(index), std::move(bip)};
}

std::pair<RoarIndex, BipartiteGraph> build_roargraph(const VectorSet& base,
                                                     const VectorSet& queries,
                                                     const BuildParams& params,
                                                     int threads) {
  if (queries.dim != base.dim) throw InvalidArgument("build_roargraph: dimension mismatch");
  if (queries.metric != base.metric) throw InvalidArgument("build_roargraph: metric mismatch");
  uint32_t nq = uint32_t(std::min<size_t>(params.nq, base.count));
  if (base.count < 2 || nq < 2 || queries.count == 0) {
    return trivial_index(base, queries.count, params);
  }
  GroundTruth gt = exact_knn(base, queries, nq, threads);
  BuildParams effective = params;
  effective.nq = nq;
  auto built = build_roargraph(base, gt, effective, threads);
  built.first.params = params;  // report requested, not clamped, parameters
  return built;
}

RoarIndex build_baseline_graph(const VectorSet& base, uint32_t m, uint32_t l, int threads) {
  RoarIndex index;
  index.metric = base.metric;
  index.dim = base.dim;
  index.params.nq = 0;
  index.params.m = m;
  index.params.l = l;
  index.adjacency.assign(base.count, {});
  index.tombstones.resize(base.count);
  if (base.count == 0) return index;
  index.medoid = medoid(base);
  if (base.count < 2) return index;

  // Exact nearest base neighbors stand in for the query-derived candidates.
  uint32_t k = uint32_t(std::min<size_t>(size_t(l) + 1, base.count));
  GroundTruth knn = exact_knn(base, base, k, threads);

  std::vector<std::mutex> locks(threads > 1 ? base.count : 0);
  auto lock_for = [&](uint32_t id) -> std::mutex* {
    return locks.empty() ? nullptr : &locks[id];
  };
  parallel_for(0, base.count, threads, [&](size_t x) {
    auto ids = knn.ids_row(x);
    auto dists = knn.dists_row(x);
    std::vector<Neighbor> cands;
    cands.reserve(ids.size());
    for (uint32_t j = 0; j < k; ++j) {
      if (ids[j] == uint32_t(x)) continue;
      cands.push_back(Neighbor{ids[j], dists[j]});
    }
    std::vector<uint32_t> selected =
        acquire_neighbors(base, base.row(x), cands, m, /*fulfill=*/true);
    {
      std::unique_lock<std::mutex> guard;
      if (auto* mu = lock_for(uint32_t(x))) guard = std::unique_lock<std::mutex>(*mu);
      index.adjacency[x] = selected;
    }
    for (uint32_t p : selected) {
      reverse_attempt(index.adjacency, base, p, uint32_t(x), m, lock_for(p));
    }
  });
  enhance_connectivity(index, base, m, l, threads);
  return index;
}

double reachable_fraction(const RoarIndex& index) {
  size_t n = index.size();
  if (n == 0) return 1.0;
  std::vector<uint8_t> seen(n, 0);
  std::vector<uint32_t> stack{index.medoid};
  seen[index.medoid] = 1;
  size_t reached = 1;
  while (!stack.empty()) {
    uint32_t v = stack.back();
    stack.pop_back();
    for (uint32_t nb : index.adjacency[v]) {
      if (!seen[nb]) {
        seen[nb] = 1;
        ++reached;
        stack.push_back(nb);
      }
    }
  }
  return double(reached) / double(n);
}

}  // namespace roar
