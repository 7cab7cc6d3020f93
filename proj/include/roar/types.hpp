#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace roar {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated precondition or malformed argument (caller bug).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// File-level failure: missing, truncated, corrupt, or wrong format.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Distance semantics. Every metric yields a scalar where smaller means
/// closer: inner product is negated, cosine is 1 - dot on unit vectors.
enum class Metric : uint8_t {
  L2 = 0,           // squared euclidean
  InnerProduct = 1, // negated dot product
  Cosine = 2,       // 1 - dot, vectors must be unit-normalized
};

inline const char* metric_name(Metric m) {
  switch (m) {
    case Metric::L2: return "l2";
    case Metric::InnerProduct: return "ip";
    case Metric::Cosine: return "cosine";
  }
  return "?";
}

Metric metric_from_name(const std::string& name);

/// Dense row-major set of `count` vectors of `dim` float32 each.
/// Immutable once constructed except through explicit append paths.
struct VectorSet {
  uint32_t dim = 0;
  size_t count = 0;
  std::vector<float> data;  // count * dim
  Metric metric = Metric::L2;

  VectorSet() = default;
  VectorSet(uint32_t dim_, size_t count_, Metric metric_ = Metric::L2)
      : dim(dim_), count(count_), data(count_ * size_t(dim_), 0.0f), metric(metric_) {}

  const float* row(size_t i) const { return data.data() + i * dim; }
  float* row(size_t i) { return data.data() + i * dim; }

  std::span<const float> row_span(size_t i) const { return {row(i), dim}; }

  bool empty() const { return count == 0; }

  /// Appends one vector; used by the insertion path only.
  void append(const float* v) {
    data.insert(data.end(), v, v + dim);
    ++count;
  }

  /// Scales every row to unit norm. Zero rows are rejected.
  void normalize_rows();

  /// Throws if any value is NaN/Inf or the buffer size disagrees with
  /// count * dim.
  void validate() const;
};

/// Exact top-k neighbors per query, rows sorted ascending by distance,
/// ties broken by smaller id.
struct GroundTruth {
  size_t query_count = 0;
  uint32_t k = 0;
  std::vector<uint32_t> ids;   // query_count * k
  std::vector<float> dists;    // query_count * k

  std::span<const uint32_t> ids_row(size_t q) const { return {ids.data() + q * k, k}; }
  std::span<const float> dists_row(size_t q) const { return {dists.data() + q * k, k}; }
};

}  // namespace roar
