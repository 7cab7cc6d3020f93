#pragma once

#include "roar/types.hpp"

namespace roar {

// Workload diagnostics. Distances are reported unsquared (square roots
// taken at this boundary for L2) even though the engine ranks with
// squared values.

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<uint64_t> counts;  // 50 uniform bins over [lo, hi]
};

Histogram histogram(std::span<const double> values, int bins = 50);

double median(std::vector<double> values);

struct MahalanobisProfile {
  std::vector<double> distances;  // one per query
  double mean = 0.0;
  double med = 0.0;
  Histogram hist;
};

/// sqrt((q-mu)^T Sigma^-1 (q-mu)) per query, with mu and Sigma estimated
/// from an evenly strided base sample of `sample_size` rows (0 = all).
/// Sigma is regularized by 1e-6 * trace / dim on the diagonal; a factor
/// that is still singular raises an error. Requires sample rows >= dim+1.
MahalanobisProfile mahalanobis_profile(const VectorSet& base, const VectorSet& queries,
                                       size_t sample_size = 0);

struct W2Result {
  double value = 0.0;
  bool converged = false;
  uint32_t iterations = 0;
};

/// Entropic 2-Wasserstein estimate between two uniform samples: Sinkhorn
/// iterations on the squared-euclidean cost, returning sqrt(<plan, cost>).
/// epsilon <= 0 selects 0.1 * median cost. Stops when the L1 marginal
/// violation drops below tol; hitting max_iters flags the result instead
/// of raising.
W2Result wasserstein2_sinkhorn(const VectorSet& a, const VectorSet& b, double epsilon = 0.0,
                               uint32_t max_iters = 1000, double tol = 1e-6);

struct NNDistanceProfile {
  std::vector<double> first_nn;  // per query, unsquared
  double mean = 0.0;
  double med = 0.0;
  Histogram hist;
};

/// Distribution of distance-to-first-neighbor from a ground truth.
NNDistanceProfile nn_distance_profile(const GroundTruth& gt, Metric metric);

/// Rank-indexed neighbor separation: for each query and rank i, the mean
/// distance from the i-th neighbor to the other k-1 neighbors, averaged
/// across queries. gt.k >= 2 required.
std::vector<double> nn_dispersion_profile(const VectorSet& base, const GroundTruth& gt);

struct SyntheticDataset {
  VectorSet base;
  VectorSet ood_queries;
  VectorSet id_queries;
};

/// Spherical-shell workload generator. Base vectors and ID queries sit on
/// the unit sphere with gaussian radial noise (sigma = shell_noise); OOD
/// queries are sphere directions sunk to radius 1 - ood_depth.
/// Deterministic per seed; dim >= 3.
SyntheticDataset gen_synthetic(size_t n_base, size_t n_query_ood, size_t n_query_id,
                               uint32_t dim, uint64_t seed, double shell_noise = 0.1,
                               double ood_depth = 0.3, Metric metric = Metric::L2);

}  // namespace roar
