#include <doctest.h>

#include "helpers.hpp"
#include "roar/distance.hpp"

using namespace roar;

TEST_CASE("dist identity and hand values") {
  std::vector<float> a{3, 4}, b{0, 0}, c{1, 2}, d{3, 4};
  CHECK(dist(Metric::L2, a.data(), a.data(), 2) == 0.0f);
  CHECK(dist(Metric::L2, b.data(), a.data(), 2) == 25.0f);  // squared form
  CHECK(dist(Metric::InnerProduct, c.data(), d.data(), 2) == -11.0f);
}

TEST_CASE("dist dimension mismatch throws") {
  std::vector<float> a{1, 2, 3}, b{1, 2};
  CHECK_THROWS_AS(dist(Metric::L2, std::span<const float>(a), std::span<const float>(b)),
                  InvalidArgument);
}

TEST_CASE("l2 symmetry is exact on random pairs") {
  auto set = testutil::random_set(64, 17, 7);
  for (size_t i = 0; i + 1 < set.count; i += 2) {
    CHECK(dist(Metric::L2, set.row(i), set.row(i + 1), set.dim) ==
          dist(Metric::L2, set.row(i + 1), set.row(i), set.dim));
  }
}

TEST_CASE("self distance is zero under l2 and near zero under cosine") {
  auto set = testutil::random_set(32, 24, 11, Metric::Cosine);
  for (size_t i = 0; i < set.count; ++i) {
    CHECK(dist(Metric::L2, set.row(i), set.row(i), set.dim) == 0.0f);
    CHECK(std::abs(dist(Metric::Cosine, set.row(i), set.row(i), set.dim)) < 1e-6f);
  }
}

TEST_CASE("inner product ordering matches raw dot argmax") {
  auto base = testutil::random_set(100, 12, 3, Metric::InnerProduct);
  auto queries = testutil::random_set(10, 12, 4, Metric::InnerProduct);
  for (size_t q = 0; q < queries.count; ++q) {
    size_t argmin_dist = 0, argmax_dot = 0;
    float best_d = dist(Metric::InnerProduct, queries.row(q), base.row(0), base.dim);
    float best_dot = dot(queries.row(q), base.row(0), base.dim);
    for (size_t i = 1; i < base.count; ++i) {
      float d = dist(Metric::InnerProduct, queries.row(q), base.row(i), base.dim);
      float ip = dot(queries.row(q), base.row(i), base.dim);
      if (d < best_d) {
        best_d = d;
        argmin_dist = i;
      }
      if (ip > best_dot) {
        best_dot = ip;
        argmax_dot = i;
      }
    }
    CHECK(argmin_dist == argmax_dot);
  }
}

TEST_CASE("medoid on collinear points and singletons") {
  auto line = testutil::from_rows({{0}, {1}, {2}});
  CHECK(medoid(line) == 1);
  auto single = testutil::from_rows({{4, 2}});
  CHECK(medoid(single) == 0);
  VectorSet empty;
  CHECK_THROWS_AS(medoid(empty), InvalidArgument);
}

TEST_CASE("medoid matches exhaustive scan against the centroid") {
  auto set = testutil::random_set(100, 8, 99);
  std::vector<double> acc(set.dim, 0.0);
  for (size_t i = 0; i < set.count; ++i) {
    for (uint32_t j = 0; j < set.dim; ++j) acc[j] += set.row(i)[j];
  }
  std::vector<float> centroid(set.dim);
  for (uint32_t j = 0; j < set.dim; ++j) centroid[j] = float(acc[j] / double(set.count));
  uint32_t best = 0;
  float best_d = dist(set.metric, centroid.data(), set.row(0), set.dim);
  for (size_t i = 1; i < set.count; ++i) {
    float d = dist(set.metric, centroid.data(), set.row(i), set.dim);
    if (d < best_d) {
      best_d = d;
      best = uint32_t(i);
    }
  }
  CHECK(medoid(set) == best);
}

TEST_CASE("normalize rejects zero rows") {
  auto set = testutil::from_rows({{0, 0, 0}});
  CHECK_THROWS_AS(set.normalize_rows(), InvalidArgument);
}

TEST_CASE("validate flags non-finite values") {
  auto set = testutil::from_rows({{1, 2}});
  set.data[0] = std::numeric_limits<float>::infinity();
  CHECK_THROWS_AS(set.validate(), InvalidArgument);
}
