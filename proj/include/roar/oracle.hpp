#pragma once

#include <span>

#include "roar/types.hpp"

namespace roar {

/// Exact brute-force top-k for every query. Rows come back sorted
/// ascending by distance with ties broken by smaller id. Parallel over
/// query chunks; per-query output is independent of the chunking.
GroundTruth exact_knn(const VectorSet& base, const VectorSet& queries, uint32_t k,
                      int threads = 1);

/// |first-k(result) ∩ first-k(truth)| / k.
double recall_at_k(std::span<const uint32_t> result, std::span<const uint32_t> truth,
                   uint32_t k);

}  // namespace roar
