#include <algorithm>
#include <queue>

#include "roar/distance.hpp"
#include "roar/oracle.hpp"
#include "roar/parallel.hpp"

namespace roar {

namespace {

struct Hit {
  float dist;
  uint32_t id;
  // heap top = worst = largest (dist, id)
  friend bool operator<(const Hit& a, const Hit& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.id < b.id;
  }
};

}  // namespace

GroundTruth exact_knn(const VectorSet& base, const VectorSet& queries, uint32_t k,
                      int threads) {
  if (base.dim != queries.dim) throw InvalidArgument("exact_knn: dimension mismatch");
  if (base.metric != queries.metric) throw InvalidArgument("exact_knn: metric mismatch");
  if (k < 1 || size_t(k) > base.count) throw InvalidArgument("exact_knn: k out of range");

  GroundTruth gt;
  gt.query_count = queries.count;
  gt.k = k;
  gt.ids.resize(queries.count * size_t(k));
  gt.dists.resize(queries.count * size_t(k));

  const Metric metric = base.metric;
  const uint32_t dim = base.dim;
  parallel_for(0, queries.count, threads, [&](size_t q) {
    const float* qv = queries.row(q);
    std::priority_queue<Hit> heap;  // size-bounded, top = current worst
    for (size_t i = 0; i < base.count; ++i) {
      float d = dist(metric, qv, base.row(i), dim);
      Hit h{d, uint32_t(i)};
      if (heap.size() < k) {
        heap.push(h);
      } else if (h < heap.top()) {
        heap.pop();
        heap.push(h);
      }
    }
    size_t off = q * size_t(k);
    for (size_t j = heap.size(); j-- > 0;) {
      gt.ids[off + j] = heap.top().id;
      gt.dists[off + j] = heap.top().dist;
      heap.pop();
    }
  });
  return gt;
}

double recall_at_k(std::span<const uint32_t> result, std::span<const uint32_t> truth,
                   uint32_t k) {
  if (k == 0) throw InvalidArgument("recall_at_k: k must be positive");
  if (truth.size() < k) throw InvalidArgument("recall_at_k: truth shorter than k");
  std::vector<uint32_t> want(truth.begin(), truth.begin() + k);
  std::sort(want.begin(), want.end());
  size_t hits = 0;
  size_t take = std::min<size_t>(k, result.size());
  for (size_t i = 0; i < take; ++i) {
    if (std::binary_search(want.begin(), want.end(), result[i])) ++hits;
  }
  return double(hits) / double(k);
}

}  // namespace roar
