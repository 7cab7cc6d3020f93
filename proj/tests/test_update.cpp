#include <doctest.h>

#include "helpers.hpp"
#include "roar/build.hpp"
#include "roar/oracle.hpp"
#include "roar/search.hpp"
#include "roar/update.hpp"

using namespace roar;

namespace {

struct BuiltFixture {
  VectorSet base;
  VectorSet queries;
  RoarIndex index;
  BipartiteGraph bip;

  BuiltFixture(size_t n, size_t t, uint64_t seed, BuildParams params) {
    base = testutil::random_set(n, 8, seed);
    queries = testutil::random_set(t, 8, seed + 1);
    auto built = build_roargraph(base, queries, params, 1);
    index = std::move(built.first);
    bip = std::move(built.second);
  }
};

void check_structure(const RoarIndex& index) {
  uint32_t cap = 2 * index.params.m;
  for (size_t x = 0; x < index.size(); ++x) {
    const auto& list = index.adjacency[x];
    CHECK(list.size() <= cap);
    std::vector<uint32_t> sorted(list.begin(), list.end());
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
    for (uint32_t nb : list) {
      CHECK(nb < index.size());
      CHECK(nb != x);
    }
  }
}

}  // namespace

TEST_CASE("insert duplicate of a pivot lands next to it and is findable") {
  BuiltFixture fx(300, 300, 101, BuildParams{10, 6, 40});

  // Pick a pivot (a node with a bipartite in-edge).
  uint32_t pivot = 0;
  for (uint32_t x = 0; x < fx.base.count; ++x) {
    if (!fx.bip.base_out[x].empty()) {
      pivot = x;
      break;
    }
  }
  std::vector<float> dup(fx.base.row(pivot), fx.base.row(pivot) + fx.base.dim);
  InsertReport rep = insert(fx.index, fx.bip, fx.base, fx.queries, dup.data(), 40);
  CHECK_FALSE(rep.fallback);
  CHECK(rep.id == 300);
  REQUIRE_FALSE(fx.index.adjacency[rep.id].empty());

  // First neighbor comes from the anchor query's retained neighborhood.
  const auto& cand_pool = fx.bip.query_out[rep.anchor_query];
  uint32_t first = fx.index.adjacency[rep.id][0];
  CHECK(std::find(cand_pool.begin(), cand_pool.end(), first) != cand_pool.end());

  SearchReport found = beam_search(fx.index, fx.base, dup.data(), 40, 1);
  REQUIRE(found.ids.size() == 1);
  CHECK(found.dists[0] == 0.0f);
  CHECK((found.ids[0] == pivot || found.ids[0] == rep.id));
}

TEST_CASE("insert into a single-node index takes the fallback path") {
  auto base = testutil::from_rows({{0.f, 0.f, 0.f}});
  VectorSet no_queries(3, 0);
  auto [index, bip] = build_roargraph(base, no_queries, BuildParams{100, 4, 16}, 1);
  VectorSet queries(3, 0);
  std::vector<float> v{1, 0, 0};
  InsertReport rep = insert(index, bip, base, queries, v.data(), 8);
  CHECK(rep.fallback);
  CHECK(rep.id == 1);
  CHECK(index.adjacency[1] == std::vector<uint32_t>{0});
}

TEST_CASE("insert keeps structural invariants and only touches its neighbors") {
  BuiltFixture fx(400, 400, 103, BuildParams{12, 6, 40});
  auto before = fx.index.adjacency;

  auto fresh = testutil::random_set(40, 8, 105);
  std::vector<uint8_t> touched(before.size(), 0);
  for (size_t i = 0; i < fresh.count; ++i) {
    InsertReport rep = insert(fx.index, fx.bip, fx.base, fx.queries, fresh.row(i));
    // Only the new node's direct neighbors may see their lists re-pruned.
    for (uint32_t p : fx.index.adjacency[rep.id]) {
      if (p < touched.size()) touched[p] = 1;
    }
  }
  check_structure(fx.index);

  for (size_t x = 0; x < before.size(); ++x) {
    if (!touched[x]) CHECK(fx.index.adjacency[x] == before[x]);
  }
}

TEST_CASE("queryOut grows on insertion") {
  BuiltFixture fx(200, 200, 107, BuildParams{8, 5, 30});
  size_t total_before = 0;
  for (const auto& out : fx.bip.query_out) total_before += out.size();
  auto fresh = testutil::random_set(10, 8, 109);
  size_t non_fallback = 0;
  for (size_t i = 0; i < fresh.count; ++i) {
    if (!insert(fx.index, fx.bip, fx.base, fx.queries, fresh.row(i)).fallback) ++non_fallback;
  }
  size_t total_after = 0;
  for (const auto& out : fx.bip.query_out) total_after += out.size();
  CHECK(total_after == total_before + non_fallback);
}

TEST_CASE("delete marks tombstones idempotently") {
  BuiltFixture fx(100, 100, 111, BuildParams{8, 5, 30});
  CHECK(remove(fx.index, 5) == DeleteStatus::Deleted);
  CHECK(remove(fx.index, 5) == DeleteStatus::AlreadyDeleted);
  CHECK(fx.index.tombstones.marked == 1);
  CHECK_THROWS_AS(remove(fx.index, 100), InvalidArgument);
}

TEST_CASE("delete then search for the exact vector returns the nearest live node") {
  BuiltFixture fx(250, 250, 113, BuildParams{10, 6, 40});
  uint32_t victim = 17;
  std::vector<float> q(fx.base.row(victim), fx.base.row(victim) + fx.base.dim);

  SearchReport before = beam_search(fx.index, fx.base, q.data(), 60, 1);
  REQUIRE(before.ids[0] == victim);

  remove(fx.index, victim);
  SearchReport after = beam_search(fx.index, fx.base, q.data(), 60, 1);
  REQUIRE(after.ids.size() == 1);
  CHECK(after.ids[0] != victim);

  // Oracle on the live set: best live node.
  auto ranked = testutil::naive_knn(fx.base, q.data(), 3);
  uint32_t best_live = ranked[0].second == victim ? ranked[1].second : ranked[0].second;
  CHECK(after.ids[0] == best_live);
}

TEST_CASE("delete all but one leaves the survivor as the only answer") {
  auto base = testutil::random_set(30, 4, 115);
  auto queries = testutil::random_set(60, 4, 117);
  auto [index, bip] = build_roargraph(base, queries, BuildParams{8, 4, 20}, 1);
  REQUIRE(reachable_fraction(index) == 1.0);
  for (uint32_t i = 0; i < 30; ++i) {
    if (i != 11) remove(index, i);
  }
  auto probe = testutil::random_set(5, 4, 119);
  for (size_t q = 0; q < probe.count; ++q) {
    SearchReport r = beam_search(index, base, probe.row(q), 30, 5);
    CHECK(r.ids == std::vector<uint32_t>{11});
  }
}

TEST_CASE("small deletion fraction leaves recall against the live oracle intact") {
  BuiltFixture fx(1000, 1000, 121, BuildParams{16, 8, 60});
  auto eval = testutil::random_set(50, 8, 123);
  GroundTruth gt = exact_knn(fx.base, eval, 10);
  BatchResult before = batch_search(fx.index, fx.base, eval, 80, 10, 1, &gt);

  // Delete 1% of nodes, recompute the oracle on the live set by brute
  // force over the survivors.
  for (uint32_t id : {3u, 77u, 215u, 408u, 512u, 640u, 781u, 802u, 903u, 990u}) {
    remove(fx.index, id);
  }
  double live_recall = 0.0;
  for (size_t q = 0; q < eval.count; ++q) {
    auto all = testutil::naive_knn(fx.base, eval.row(q), uint32_t(fx.base.count));
    std::vector<uint32_t> live_truth;
    for (auto& [d, id] : all) {
      if (!fx.index.tombstones.test(id)) live_truth.push_back(id);
      if (live_truth.size() == 10) break;
    }
    SearchReport r = beam_search(fx.index, fx.base, eval.row(q), 80, 10);
    live_recall += recall_at_k(r.ids, live_truth, 10);
  }
  live_recall /= double(eval.count);
  CHECK(live_recall >= before.mean_recall - 0.02);
}
