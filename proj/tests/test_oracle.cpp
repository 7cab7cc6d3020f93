#include <doctest.h>

#include <numeric>

#include "helpers.hpp"
#include "roar/oracle.hpp"

using namespace roar;

TEST_CASE("exact_knn hand-computed instance") {
  auto base = testutil::from_rows({{0, 0}, {1, 0}, {5, 5}});
  auto queries = testutil::from_rows({{0.9f, 0}});
  GroundTruth gt = exact_knn(base, queries, 2);
  // squared distances: 0.81, 0.01, 41.81
  CHECK(gt.ids_row(0)[0] == 1);
  CHECK(gt.ids_row(0)[1] == 0);
  CHECK(gt.dists_row(0)[0] == doctest::Approx(0.01).epsilon(1e-6));
}

TEST_CASE("exact_knn with k = count returns everything sorted") {
  auto base = testutil::random_set(20, 4, 5);
  auto queries = testutil::random_set(3, 4, 6);
  GroundTruth gt = exact_knn(base, queries, 20);
  for (size_t q = 0; q < gt.query_count; ++q) {
    auto d = gt.dists_row(q);
    CHECK(std::is_sorted(d.begin(), d.end()));
    std::vector<uint32_t> ids(gt.ids_row(q).begin(), gt.ids_row(q).end());
    std::sort(ids.begin(), ids.end());
    for (uint32_t i = 0; i < 20; ++i) CHECK(ids[i] == i);
  }
}

TEST_CASE("query equal to a base vector ranks it first at distance zero") {
  auto base = testutil::random_set(50, 6, 7);
  VectorSet queries(6, 1);
  std::copy(base.row(31), base.row(31) + 6, queries.row(0));
  GroundTruth gt = exact_knn(base, queries, 3);
  CHECK(gt.ids_row(0)[0] == 31);
  CHECK(gt.dists_row(0)[0] == 0.0f);
}

TEST_CASE("exact_knn agrees with the naive double loop on all metrics") {
  for (Metric metric : {Metric::L2, Metric::InnerProduct, Metric::Cosine}) {
    auto base = testutil::random_set(200, 16, 11, metric);
    auto queries = testutil::random_set(25, 16, 13, metric);
    GroundTruth gt = exact_knn(base, queries, 10, 3);
    for (size_t q = 0; q < queries.count; ++q) {
      auto expected = testutil::naive_knn(base, queries.row(q), 10);
      for (uint32_t j = 0; j < 10; ++j) {
        CHECK(gt.ids_row(q)[j] == expected[j].second);
        CHECK(gt.dists_row(q)[j] == expected[j].first);
      }
    }
  }
}

TEST_CASE("exact_knn result independent of thread chunking") {
  auto base = testutil::random_set(150, 8, 17);
  auto queries = testutil::random_set(33, 8, 19);
  GroundTruth serial = exact_knn(base, queries, 5, 1);
  GroundTruth parallel = exact_knn(base, queries, 5, 4);
  CHECK(serial.ids == parallel.ids);
  CHECK(serial.dists == parallel.dists);
}

TEST_CASE("exact_knn contract errors") {
  auto base = testutil::random_set(10, 4, 1);
  auto queries = testutil::random_set(2, 4, 2);
  CHECK_THROWS_AS(exact_knn(base, queries, 0), InvalidArgument);
  CHECK_THROWS_AS(exact_knn(base, queries, 11), InvalidArgument);
  auto wrong_metric = testutil::random_set(2, 4, 2, Metric::Cosine);
  CHECK_THROWS_AS(exact_knn(base, wrong_metric, 2), InvalidArgument);
}

TEST_CASE("recall basics") {
  std::vector<uint32_t> truth{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  CHECK(recall_at_k(truth, truth, 10) == 1.0);
  std::vector<uint32_t> disjoint{11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
  CHECK(recall_at_k(disjoint, truth, 10) == 0.0);
  std::vector<uint32_t> half{1, 2, 3, 4, 5, 16, 17, 18, 19, 20};
  CHECK(recall_at_k(half, truth, 10) == 0.5);
  CHECK_THROWS_AS(recall_at_k(truth, truth, 0), InvalidArgument);
}

TEST_CASE("mean recall is invariant to query order") {
  auto base = testutil::random_set(80, 8, 23);
  auto queries = testutil::random_set(16, 8, 29);
  GroundTruth gt = exact_knn(base, queries, 5);

  // Same queries, reversed order.
  VectorSet reversed(queries.dim, queries.count);
  for (size_t q = 0; q < queries.count; ++q) {
    std::copy(queries.row(q), queries.row(q) + queries.dim,
              reversed.row(queries.count - 1 - q));
  }
  GroundTruth gt_rev = exact_knn(base, reversed, 5);

  auto mean_recall = [](const GroundTruth& a, const GroundTruth& b, bool flip) {
    double sum = 0;
    for (size_t q = 0; q < a.query_count; ++q) {
      size_t qb = flip ? a.query_count - 1 - q : q;
      sum += recall_at_k(a.ids_row(q), b.ids_row(qb), 5);
    }
    return sum / double(a.query_count);
  };
  CHECK(mean_recall(gt, gt, false) == 1.0);
  CHECK(mean_recall(gt_rev, gt, true) == 1.0);
}
