#include <algorithm>
#include <cmath>
#include <random>

#include "roar/analysis.hpp"
#include "roar/distance.hpp"

namespace roar {

Histogram histogram(std::span<const double> values, int bins) {
  Histogram h;
  h.counts.assign(size_t(bins), 0);
  if (values.empty()) return h;
  h.lo = *std::min_element(values.begin(), values.end());
  h.hi = *std::max_element(values.begin(), values.end());
  double width = h.hi - h.lo;
  for (double v : values) {
    size_t bin = width > 0 ? size_t((v - h.lo) / width * bins) : 0;
    if (bin >= size_t(bins)) bin = size_t(bins) - 1;
    ++h.counts[bin];
  }
  return h;
}

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("median of empty sequence");
  size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double hi = values[mid];
  if (values.size() % 2 == 1) return hi;
  double lo = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lo + hi);
}

namespace {

// Lower-triangular Cholesky factor of a symmetric positive-definite
// matrix stored row-major; returns false on a non-positive pivot.
bool cholesky(std::vector<double>& a, size_t d) {
  for (size_t j = 0; j < d; ++j) {
    double diag = a[j * d + j];
    for (size_t k = 0; k < j; ++k) diag -= a[j * d + k] * a[j * d + k];
    if (diag <= 0.0) return false;
    double root = std::sqrt(diag);
    a[j * d + j] = root;
    for (size_t i = j + 1; i < d; ++i) {
      double v = a[i * d + j];
      for (size_t k = 0; k < j; ++k) v -= a[i * d + k] * a[j * d + k];
      a[i * d + j] = v / root;
    }
  }
  return true;
}

// Solves L y = b in place given the Cholesky factor.
void forward_solve(const std::vector<double>& l, size_t d, std::vector<double>& b) {
  for (size_t i = 0; i < d; ++i) {
    double v = b[i];
    for (size_t k = 0; k < i; ++k) v -= l[i * d + k] * b[k];
    b[i] = v / l[i * d + i];
  }
}

}  // namespace

MahalanobisProfile mahalanobis_profile(const VectorSet& base, const VectorSet& queries,
                                       size_t sample_size) {
  if (base.dim != queries.dim) throw InvalidArgument("mahalanobis: dimension mismatch");
  size_t d = base.dim;
  if (sample_size == 0 || sample_size > base.count) sample_size = base.count;
  if (sample_size < d + 1) {
    throw InvalidArgument("mahalanobis: base sample must have at least dim+1 rows");
  }
  // Evenly strided sample keeps the estimate deterministic.
  size_t stride = base.count / sample_size;
  if (stride == 0) stride = 1;
  std::vector<size_t> rows;
  for (size_t i = 0; i < base.count && rows.size() < sample_size; i += stride) rows.push_back(i);
  size_t n = rows.size();

  std::vector<double> mu(d, 0.0);
  for (size_t r : rows) {
    const float* v = base.row(r);
    for (size_t j = 0; j < d; ++j) mu[j] += v[j];
  }
  for (size_t j = 0; j < d; ++j) mu[j] /= double(n);

  std::vector<double> cov(d * d, 0.0);
  std::vector<double> centered(d);
  for (size_t r : rows) {
    const float* v = base.row(r);
    for (size_t j = 0; j < d; ++j) centered[j] = v[j] - mu[j];
    for (size_t i = 0; i < d; ++i) {
      for (size_t j = 0; j <= i; ++j) cov[i * d + j] += centered[i] * centered[j];
    }
  }
  double trace = 0.0;
  for (size_t i = 0; i < d; ++i) {
    for (size_t j = 0; j <= i; ++j) {
      cov[i * d + j] /= double(n);
      cov[j * d + i] = cov[i * d + j];
    }
    trace += cov[i * d + i];
  }
  double lambda = 1e-6 * trace / double(d);
  for (size_t i = 0; i < d; ++i) cov[i * d + i] += lambda;

  if (!cholesky(cov, d)) {
    throw InvalidArgument("mahalanobis: covariance singular after regularization");
  }

  MahalanobisProfile profile;
  profile.distances.resize(queries.count);
  std::vector<double> delta(d);
  for (size_t q = 0; q < queries.count; ++q) {
    const float* v = queries.row(q);
    for (size_t j = 0; j < d; ++j) delta[j] = v[j] - mu[j];
    forward_solve(cov, d, delta);  // d_M^2 = ||L^-1 (q - mu)||^2
    double sq = 0.0;
    for (size_t j = 0; j < d; ++j) sq += delta[j] * delta[j];
    profile.distances[q] = std::sqrt(sq);
  }
  if (!profile.distances.empty()) {
    double sum = 0.0;
    for (double v : profile.distances) sum += v;
    profile.mean = sum / double(profile.distances.size());
    profile.med = median(profile.distances);
    profile.hist = histogram(profile.distances);
  }
  return profile;
}

W2Result wasserstein2_sinkhorn(const VectorSet& a, const VectorSet& b, double epsilon,
                               uint32_t max_iters, double tol) {
  if (a.dim != b.dim) throw InvalidArgument("wasserstein2: dimension mismatch");
  if (a.count == 0 || b.count == 0) throw InvalidArgument("wasserstein2: empty sample");
  size_t n = a.count, m = b.count;

  std::vector<double> cost(n * m);
  for (size_t i = 0; i < n; ++i) {
    const float* av = a.row(i);
    for (size_t j = 0; j < m; ++j) {
      cost[i * m + j] = double(l2_sqr(av, b.row(j), a.dim));
    }
  }
  if (epsilon <= 0.0) {
    std::vector<double> copy = cost;
    epsilon = 0.1 * median(std::move(copy));
    if (epsilon <= 0.0) epsilon = 1e-9;  // all-zero cost (identical points)
  }

  std::vector<double> kernel(n * m);
  for (size_t i = 0; i < n * m; ++i) kernel[i] = std::exp(-cost[i] / epsilon);

  // Uniform marginals; u,v scaling iterations.
  double mu = 1.0 / double(n), nu = 1.0 / double(m);
  std::vector<double> u(n, 1.0), v(m, 1.0), kv(n), ktu(m);
  W2Result result;
  for (uint32_t it = 0; it < max_iters; ++it) {
    result.iterations = it + 1;
    for (size_t i = 0; i < n; ++i) {
      double s = 0.0;
      const double* row = &kernel[i * m];
      for (size_t j = 0; j < m; ++j) s += row[j] * v[j];
      if (s <= 0.0 || !std::isfinite(s)) return result;  // underflow, not converged
      u[i] = mu / s;
      kv[i] = s;
    }
    for (size_t j = 0; j < m; ++j) ktu[j] = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double* row = &kernel[i * m];
      for (size_t j = 0; j < m; ++j) ktu[j] += row[j] * u[i];
    }
    for (size_t j = 0; j < m; ++j) {
      if (ktu[j] <= 0.0 || !std::isfinite(ktu[j])) return result;
      v[j] = nu / ktu[j];
    }
    // L1 violation of the row marginal under the updated v.
    double violation = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double s = 0.0;
      const double* row = &kernel[i * m];
      for (size_t j = 0; j < m; ++j) s += row[j] * v[j];
      violation += std::abs(u[i] * s - mu);
    }
    if (violation < tol) {
      result.converged = true;
      break;
    }
  }

  double transport_cost = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double* krow = &kernel[i * m];
    const double* crow = &cost[i * m];
    double s = 0.0;
    for (size_t j = 0; j < m; ++j) s += krow[j] * v[j] * crow[j];
    transport_cost += u[i] * s;
  }
  result.value = std::sqrt(std::max(0.0, transport_cost));
  return result;
}

namespace {

double report_distance(Metric metric, double engine_value) {
  // Engine ranks with squared L2; human-facing profiles are unsquared.
  if (metric == Metric::L2) return std::sqrt(std::max(0.0, engine_value));
  return engine_value;
}

}  // namespace

NNDistanceProfile nn_distance_profile(const GroundTruth& gt, Metric metric) {
  if (gt.k < 1) throw InvalidArgument("nn_distance_profile: k must be >= 1");
  NNDistanceProfile profile;
  profile.first_nn.resize(gt.query_count);
  for (size_t q = 0; q < gt.query_count; ++q) {
    profile.first_nn[q] = report_distance(metric, gt.dists_row(q)[0]);
  }
  if (!profile.first_nn.empty()) {
    double sum = 0.0;
    for (double v : profile.first_nn) sum += v;
    profile.mean = sum / double(profile.first_nn.size());
    profile.med = median(profile.first_nn);
    profile.hist = histogram(profile.first_nn);
  }
  return profile;
}

std::vector<double> nn_dispersion_profile(const VectorSet& base, const GroundTruth& gt) {
  if (gt.k < 2) throw InvalidArgument("nn_dispersion_profile: k must be >= 2");
  uint32_t k = gt.k;
  std::vector<double> rank_means(k, 0.0);
  std::vector<double> pair_dist(size_t(k) * k);
  for (size_t q = 0; q < gt.query_count; ++q) {
    auto ids = gt.ids_row(q);
    for (uint32_t i = 0; i < k; ++i) {
      for (uint32_t j = i + 1; j < k; ++j) {
        double d = report_distance(
            base.metric, dist(base.metric, base.row(ids[i]), base.row(ids[j]), base.dim));
        pair_dist[i * k + j] = d;
        pair_dist[j * k + i] = d;
      }
    }
    for (uint32_t i = 0; i < k; ++i) {
      double sum = 0.0;
      for (uint32_t j = 0; j < k; ++j) {
        if (j != i) sum += pair_dist[i * k + j];
      }
      rank_means[i] += sum / double(k - 1);
    }
  }
  if (gt.query_count > 0) {
    for (double& v : rank_means) v /= double(gt.query_count);
  }
  return rank_means;
}

SyntheticDataset gen_synthetic(size_t n_base, size_t n_query_ood, size_t n_query_id,
                               uint32_t dim, uint64_t seed, double shell_noise,
                               double ood_depth, Metric metric) {
  if (dim < 3) throw InvalidArgument("gen_synthetic: dim must be >= 3");
  if (shell_noise < 0.0) throw InvalidArgument("gen_synthetic: shell_noise must be >= 0");
  if (ood_depth < 0.0 || ood_depth >= 1.0) {
    throw InvalidArgument("gen_synthetic: ood_depth must be in [0, 1)");
  }

  // Separate derived streams so each set is stable under the others'
  // size changes.
  auto fill_shell = [&](VectorSet& set, size_t n, uint64_t stream, bool sunk) {
    set = VectorSet(dim, n, metric);
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + stream);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (size_t i = 0; i < n; ++i) {
      float* row = set.row(i);
      double norm_sq = 0.0;
      for (uint32_t j = 0; j < dim; ++j) {
        double g = gauss(rng);
        row[j] = float(g);
        norm_sq += g * g;
      }
      double radius = sunk ? (1.0 - ood_depth) : 1.0 + gauss(rng) * shell_noise;
      double scale = radius / std::sqrt(norm_sq);
      for (uint32_t j = 0; j < dim; ++j) row[j] = float(double(row[j]) * scale);
    }
    if (metric == Metric::Cosine) set.normalize_rows();
  };

  SyntheticDataset out;
  fill_shell(out.base, n_base, 1, false);
  fill_shell(out.ood_queries, n_query_ood, 2, true);
  fill_shell(out.id_queries, n_query_id, 3, false);
  return out;
}

}  // namespace roar
