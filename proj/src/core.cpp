#include <algorithm>
#include <cmath>

#include "roar/distance.hpp"
#include "roar/types.hpp"

namespace roar {

Metric metric_from_name(const std::string& name) {
  if (name == "l2") return Metric::L2;
  if (name == "ip") return Metric::InnerProduct;
  if (name == "cosine") return Metric::Cosine;
  throw InvalidArgument("unknown metric: " + name);
}

void VectorSet::normalize_rows() {
  for (size_t i = 0; i < count; ++i) {
    float* r = row(i);
    float norm_sq = dot(r, r, dim);
    if (norm_sq <= 0.0f) {
      throw InvalidArgument("cannot normalize zero vector at row " + std::to_string(i));
    }
    float inv = 1.0f / std::sqrt(norm_sq);
    for (uint32_t j = 0; j < dim; ++j) r[j] *= inv;
  }
}

void VectorSet::validate() const {
  if (data.size() != count * size_t(dim)) {
    throw InvalidArgument("vector set buffer size disagrees with count*dim");
  }
  for (float v : data) {
    if (!std::isfinite(v)) throw InvalidArgument("vector set contains non-finite value");
  }
}

float dist(Metric m, std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("dist: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  }
  return dist(m, a.data(), b.data(), a.size());
}

uint32_t medoid(const VectorSet& base) {
  if (base.count == 0) throw InvalidArgument("medoid of empty set");
  std::vector<double> acc(base.dim, 0.0);
  for (size_t i = 0; i < base.count; ++i) {
    const float* r = base.row(i);
    for (uint32_t j = 0; j < base.dim; ++j) acc[j] += r[j];
  }
  std::vector<float> centroid(base.dim);
  for (uint32_t j = 0; j < base.dim; ++j) {
    centroid[j] = float(acc[j] / double(base.count));
  }
  uint32_t best = 0;
  float best_dist = dist(base.metric, centroid.data(), base.row(0), base.dim);
  for (size_t i = 1; i < base.count; ++i) {
    float d = dist(base.metric, centroid.data(), base.row(i), base.dim);
    if (d < best_dist) {
      best_dist = d;
      best = uint32_t(i);
    }
  }
  return best;
}

}  // namespace roar
