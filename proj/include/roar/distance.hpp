#pragma once

#include <span>

#include "roar/types.hpp"

namespace roar {

// Kernels accumulate in 8 independent float lanes combined pairwise at the
// end. The lane order is fixed, so results are deterministic for a given
// build regardless of thread count.

inline float l2_sqr(const float* a, const float* b, size_t d) {
  float acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  size_t i = 0;
  for (; i + 8 <= d; i += 8) {
    for (int lane = 0; lane < 8; ++lane) {
      float t = a[i + lane] - b[i + lane];
      acc[lane] += t * t;
    }
  }
  for (; i < d; ++i) {
    float t = a[i] - b[i];
    acc[i & 7] += t * t;
  }
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
}

inline float dot(const float* a, const float* b, size_t d) {
  float acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  size_t i = 0;
  for (; i + 8 <= d; i += 8) {
    for (int lane = 0; lane < 8; ++lane) {
      acc[lane] += a[i + lane] * b[i + lane];
    }
  }
  for (; i < d; ++i) {
    acc[i & 7] += a[i] * b[i];
  }
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
}

/// Comparable scalar, smaller = closer under every metric.
inline float dist(Metric m, const float* a, const float* b, size_t d) {
  switch (m) {
    case Metric::L2: return l2_sqr(a, b, d);
    case Metric::InnerProduct: return -dot(a, b, d);
    case Metric::Cosine: return 1.0f - dot(a, b, d);
  }
  return 0.0f;
}

/// Checked variant for external callers.
float dist(Metric m, std::span<const float> a, std::span<const float> b);

/// Id of the base vector nearest the arithmetic centroid under the set's
/// metric; ties go to the smaller id. Search entry point.
uint32_t medoid(const VectorSet& base);

}  // namespace roar
