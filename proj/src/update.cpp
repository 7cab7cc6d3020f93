#include <algorithm>

#include "roar/build.hpp"
#include "roar/distance.hpp"
#include "roar/search.hpp"
#include "roar/update.hpp"

namespace roar {

namespace {

// Reverse edge for insertion: the new node is offered to neighbor p under
// the final degree cap. Appends while there is room; on overflow the whole
// list is re-pruned.
void reverse_insert(RoarIndex& index, const VectorSet& base, uint32_t p, uint32_t new_id) {
  auto& list = index.adjacency[p];
  if (std::find(list.begin(), list.end(), new_id) != list.end()) return;
  uint32_t cap = 2 * index.params.m;
  if (list.size() < cap) {
    list.push_back(new_id);
    return;
  }
  std::vector<Neighbor> cands;
  cands.reserve(list.size() + 1);
  const float* pv = base.row(p);
  for (uint32_t id : list) {
    cands.push_back(Neighbor{id, dist(base.metric, pv, base.row(id), base.dim)});
  }
  cands.push_back(Neighbor{new_id, dist(base.metric, pv, base.row(new_id), base.dim)});
  std::sort(cands.begin(), cands.end());
  list = acquire_neighbors(base, pv, cands, cap, /*fulfill=*/false);
}

}  // namespace

InsertReport insert(RoarIndex& index, BipartiteGraph& bipartite, VectorSet& base,
                    const VectorSet& queries, const float* v, uint32_t search_l) {
  if (index.size() != base.count) throw InvalidArgument("insert: index/base size mismatch");
  if (bipartite.base_count() != base.count) {
    throw InvalidArgument("insert: bipartite/base size mismatch");
  }
  if (bipartite.query_count() != queries.count) {
    throw InvalidArgument("insert: bipartite/query size mismatch");
  }
  if (queries.dim != base.dim) throw InvalidArgument("insert: query dimension mismatch");
  if (index.size() == 0) throw InvalidArgument("insert: cannot insert into empty index");
  uint32_t m = index.params.m;
  if (m < 1) throw InvalidArgument("insert: index has no degree bound");
  if (search_l == 0) search_l = std::max<uint32_t>(index.params.l, 1);

  InsertReport report;
  uint32_t new_id = uint32_t(base.count);
  report.id = new_id;

  // Search happens before the node exists in the graph; the pool of the
  // converged search doubles as the fallback candidate list.
  SearchReport search =
      beam_search(index, base, v, search_l, 1, SearchMode::Construction);

  base.append(v);
  index.adjacency.emplace_back();
  index.tombstones.resize(base.count);
  bipartite.base_out.emplace_back();
  if (!bipartite.base_out_dist.empty()) bipartite.base_out_dist.emplace_back();

  // Nearest pool entry with a bipartite in-edge anchors the insertion.
  uint32_t anchor_base = 0;
  bool found = false;
  for (uint32_t id : search.visited_list) {
    if (!bipartite.base_out[id].empty()) {
      anchor_base = id;
      found = true;
      break;
    }
  }

  std::vector<uint32_t> candidate_ids;
  if (found) {
    // Among the anchor's queries, the one nearest to v supplies the
    // sub-bipartite candidates.
    uint32_t best_q = 0;
    float best_d = 0.0f;
    bool first = true;
    for (uint32_t q : bipartite.base_out[anchor_base]) {
      float d = dist(base.metric, v, queries.row(q), base.dim);
      if (first || d < best_d || (d == best_d && q < best_q)) {
        best_q = q;
        best_d = d;
        first = false;
      }
    }
    report.anchor_query = best_q;
    candidate_ids = bipartite.query_out[best_q];
    bipartite.query_out[best_q].push_back(new_id);
  } else {
    report.fallback = true;
    candidate_ids = search.visited_list;
  }

  candidate_ids.erase(std::remove(candidate_ids.begin(), candidate_ids.end(), new_id),
                      candidate_ids.end());
  std::vector<Neighbor> cands;
  cands.reserve(candidate_ids.size());
  for (uint32_t id : candidate_ids) {
    cands.push_back(Neighbor{id, dist(base.metric, v, base.row(id), base.dim)});
  }
  std::sort(cands.begin(), cands.end());
  std::vector<uint32_t> selected = acquire_neighbors(base, v, cands, m, /*fulfill=*/true);
  index.adjacency[new_id] = selected;
  for (uint32_t p : selected) {
    reverse_insert(index, base, p, new_id);
  }
  return report;
}

DeleteStatus remove(RoarIndex& index, uint32_t id) {
  if (size_t(id) >= index.size()) throw InvalidArgument("remove: id out of range");
  if (index.tombstones.test(id)) return DeleteStatus::AlreadyDeleted;
  index.tombstones.set(id);
  return DeleteStatus::Deleted;
}

}  // namespace roar
