#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "roar/io.hpp"

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts are unsupported");

namespace roar {

namespace {

constexpr char kMagic[4] = {'R', 'O', 'A', 'R'};
constexpr uint32_t kFormatVersion = 1;

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path.string()), in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open " + path_);
  }

  template <class T>
  T get() {
    T v;
    raw(&v, sizeof(T));
    return v;
  }

  void raw(void* dst, size_t n) {
    in_.read(reinterpret_cast<char*>(dst), std::streamsize(n));
    if (size_t(in_.gcount()) != n) throw IoError(path_ + ": truncated file");
  }

  template <class T>
  void block(std::vector<T>& dst, size_t n) {
    dst.resize(n);
    if (n) raw(dst.data(), n * sizeof(T));
  }

  void expect_eof() {
    in_.peek();
    if (!in_.eof()) throw IoError(path_ + ": trailing data after expected end");
  }

 private:
  std::string path_;
  std::ifstream in_;
};

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : path_(path.string()), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot open " + path_ + " for writing");
  }

  template <class T>
  void put(T v) {
    raw(&v, sizeof(T));
  }

  void raw(const void* src, size_t n) {
    out_.write(reinterpret_cast<const char*>(src), std::streamsize(n));
    if (!out_) throw IoError(path_ + ": write failed");
  }

  template <class T>
  void block(const std::vector<T>& src) {
    if (!src.empty()) raw(src.data(), src.size() * sizeof(T));
  }

  void close() {
    out_.close();
    if (!out_) throw IoError(path_ + ": close failed");
  }

 private:
  std::string path_;
  std::ofstream out_;
};

// count*dim with overflow check against what a file could actually hold
size_t payload_elems(uint32_t count, uint32_t dim, const char* what) {
  size_t n = size_t(count) * size_t(dim);
  if (dim == 0 && count != 0) throw IoError(std::string(what) + ": zero dim with nonzero count");
  if (n / (dim ? dim : 1) != count) throw IoError(std::string(what) + ": count*dim overflow");
  return n;
}

template <class Elem>
std::vector<Elem> read_bin_payload(Reader& r, uint32_t& count, uint32_t& dim, const char* what) {
  count = r.get<uint32_t>();
  dim = r.get<uint32_t>();
  std::vector<Elem> payload;
  r.block(payload, payload_elems(count, dim, what));
  return payload;
}

}  // namespace

VectorSet read_fbin(const std::filesystem::path& path, Metric metric) {
  Reader r(path);
  uint32_t count, dim;
  std::vector<float> payload = read_bin_payload<float>(r, count, dim, "fbin");
  r.expect_eof();
  VectorSet set;
  set.dim = dim;
  set.count = count;
  set.data = std::move(payload);
  set.metric = metric;
  for (float v : set.data) {
    if (!std::isfinite(v)) throw IoError(path.string() + ": non-finite value in payload");
  }
  if (metric == Metric::Cosine) set.normalize_rows();
  return set;
}

void write_fbin(const VectorSet& set, const std::filesystem::path& path) {
  if (set.count > std::numeric_limits<uint32_t>::max()) throw IoError("fbin: count exceeds u32");
  Writer w(path);
  w.put<uint32_t>(uint32_t(set.count));
  w.put<uint32_t>(set.dim);
  w.block(set.data);
  w.close();
}

VectorSet read_u8bin(const std::filesystem::path& path, Metric metric) {
  Reader r(path);
  uint32_t count, dim;
  std::vector<uint8_t> payload = read_bin_payload<uint8_t>(r, count, dim, "u8bin");
  r.expect_eof();
  VectorSet set;
  set.dim = dim;
  set.count = count;
  set.metric = metric;
  set.data.resize(payload.size());
  for (size_t i = 0; i < payload.size(); ++i) set.data[i] = float(payload[i]);
  if (metric == Metric::Cosine) set.normalize_rows();
  return set;
}

void write_u8bin(const VectorSet& set, const std::filesystem::path& path) {
  if (set.count > std::numeric_limits<uint32_t>::max()) throw IoError("u8bin: count exceeds u32");
  std::vector<uint8_t> payload(set.data.size());
  for (size_t i = 0; i < set.data.size(); ++i) {
    float v = set.data[i];
    if (v < 0.0f || v > 255.0f || v != std::floor(v)) {
      throw InvalidArgument("u8bin: value not an integer in [0,255]");
    }
    payload[i] = uint8_t(v);
  }
  Writer w(path);
  w.put<uint32_t>(uint32_t(set.count));
  w.put<uint32_t>(set.dim);
  w.block(payload);
  w.close();
}

std::vector<uint32_t> read_ibin(const std::filesystem::path& path, uint32_t* dim_out,
                                size_t* count_out) {
  Reader r(path);
  uint32_t count, dim;
  std::vector<uint32_t> payload = read_bin_payload<uint32_t>(r, count, dim, "ibin");
  r.expect_eof();
  if (dim_out) *dim_out = dim;
  if (count_out) *count_out = count;
  return payload;
}

void write_ibin(std::span<const uint32_t> values, size_t count, uint32_t dim,
                const std::filesystem::path& path) {
  if (values.size() != count * size_t(dim)) throw InvalidArgument("ibin: size != count*dim");
  if (count > std::numeric_limits<uint32_t>::max()) throw IoError("ibin: count exceeds u32");
  Writer w(path);
  w.put<uint32_t>(uint32_t(count));
  w.put<uint32_t>(dim);
  if (!values.empty()) w.raw(values.data(), values.size() * sizeof(uint32_t));
  w.close();
}

GroundTruth read_gt(const std::filesystem::path& path) {
  Reader r(path);
  uint32_t id_count, id_k;
  std::vector<uint32_t> ids = read_bin_payload<uint32_t>(r, id_count, id_k, "gt ids");
  uint32_t d_count, d_k;
  std::vector<float> dists = read_bin_payload<float>(r, d_count, d_k, "gt dists");
  r.expect_eof();
  if (id_count != d_count || id_k != d_k) throw IoError(path.string() + ": gt block headers disagree");
  if (id_k == 0) throw IoError(path.string() + ": gt requires k >= 1");
  GroundTruth gt;
  gt.query_count = id_count;
  gt.k = id_k;
  gt.ids = std::move(ids);
  gt.dists = std::move(dists);
  for (size_t q = 0; q < gt.query_count; ++q) {
    auto row_ids = gt.ids_row(q);
    auto row_dists = gt.dists_row(q);
    for (uint32_t j = 0; j + 1 < gt.k; ++j) {
      if (row_dists[j] > row_dists[j + 1]) {
        throw IoError(path.string() + ": gt row " + std::to_string(q) + " not sorted by distance");
      }
    }
    std::vector<uint32_t> sorted(row_ids.begin(), row_ids.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw IoError(path.string() + ": gt row " + std::to_string(q) + " has duplicate ids");
    }
  }
  return gt;
}

void write_gt(const GroundTruth& gt, const std::filesystem::path& path) {
  if (gt.k == 0) throw InvalidArgument("write_gt: k must be >= 1");
  if (gt.query_count > std::numeric_limits<uint32_t>::max()) throw IoError("gt: count exceeds u32");
  Writer w(path);
  w.put<uint32_t>(uint32_t(gt.query_count));
  w.put<uint32_t>(gt.k);
  w.block(gt.ids);
  w.put<uint32_t>(uint32_t(gt.query_count));
  w.put<uint32_t>(gt.k);
  w.block(gt.dists);
  w.close();
}

namespace {

void write_csr(Writer& w, const std::vector<std::vector<uint32_t>>& lists) {
  std::vector<uint64_t> offsets(lists.size() + 1, 0);
  for (size_t i = 0; i < lists.size(); ++i) offsets[i + 1] = offsets[i] + lists[i].size();
  w.block(offsets);
  for (const auto& list : lists) w.block(list);
}

std::vector<std::vector<uint32_t>> read_csr(Reader& r, size_t rows, uint64_t id_limit,
                                            const char* what) {
  std::vector<uint64_t> offsets;
  r.block(offsets, rows + 1);
  if (offsets[0] != 0) throw IoError(std::string(what) + ": CSR offsets must start at 0");
  for (size_t i = 0; i < rows; ++i) {
    if (offsets[i + 1] < offsets[i]) throw IoError(std::string(what) + ": CSR offsets decrease");
  }
  std::vector<std::vector<uint32_t>> lists(rows);
  for (size_t i = 0; i < rows; ++i) {
    size_t len = size_t(offsets[i + 1] - offsets[i]);
    r.block(lists[i], len);
    for (uint32_t id : lists[i]) {
      if (uint64_t(id) >= id_limit) {
        throw IoError(std::string(what) + ": neighbor id " + std::to_string(id) + " out of range");
      }
    }
  }
  return lists;
}

}  // namespace

void save_index(const RoarIndex& index, const BipartiteGraph* bipartite,
                const std::filesystem::path& path) {
  size_t n = index.size();
  for (size_t i = 0; i < n; ++i) {
    for (uint32_t nb : index.adjacency[i]) {
      if (size_t(nb) >= n) throw InvalidArgument("save_index: adjacency id out of range");
    }
  }
  Writer w(path);
  w.raw(kMagic, 4);
  w.put<uint32_t>(kFormatVersion);
  w.put<uint8_t>(uint8_t(index.metric));
  w.put<uint32_t>(index.dim);
  w.put<uint64_t>(n);
  w.put<uint64_t>(index.medoid);
  w.put<uint32_t>(index.params.nq);
  w.put<uint32_t>(index.params.m);
  w.put<uint32_t>(index.params.l);
  write_csr(w, index.adjacency);
  std::vector<uint8_t> bitmap((n + 7) / 8, 0);
  for (size_t i = 0; i < n; ++i) {
    if (index.tombstones.test(uint32_t(i))) bitmap[i >> 3] |= uint8_t(1u << (i & 7));
  }
  w.block(bitmap);
  w.put<uint8_t>(bipartite ? 1 : 0);
  if (bipartite) {
    w.put<uint64_t>(bipartite->query_count());
    write_csr(w, bipartite->query_out);
    if (bipartite->base_count() != n) {
      throw InvalidArgument("save_index: bipartite base count disagrees with index size");
    }
    write_csr(w, bipartite->base_out);
  }
  w.close();
}

LoadedIndex load_index(const std::filesystem::path& path) {
  Reader r(path);
  char magic[4];
  r.raw(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw IoError(path.string() + ": bad magic");
  uint32_t version = r.get<uint32_t>();
  if (version != kFormatVersion) {
    throw IoError(path.string() + ": unsupported format version " + std::to_string(version));
  }
  LoadedIndex out;
  RoarIndex& index = out.index;
  uint8_t metric_byte = r.get<uint8_t>();
  if (metric_byte > 2) throw IoError(path.string() + ": bad metric byte");
  index.metric = Metric(metric_byte);
  index.dim = r.get<uint32_t>();
  uint64_t n = r.get<uint64_t>();
  uint64_t med = r.get<uint64_t>();
  if (n > 0 && med >= n) throw IoError(path.string() + ": medoid out of range");
  index.medoid = uint32_t(med);
  index.params.nq = r.get<uint32_t>();
  index.params.m = r.get<uint32_t>();
  index.params.l = r.get<uint32_t>();
  index.adjacency = read_csr(r, size_t(n), n, "adjacency");
  std::vector<uint8_t> bitmap;
  r.block(bitmap, size_t((n + 7) / 8));
  index.tombstones.resize(size_t(n));
  for (size_t i = 0; i < n; ++i) {
    if ((bitmap[i >> 3] >> (i & 7)) & 1) index.tombstones.set(uint32_t(i));
  }
  uint8_t has_bipartite = r.get<uint8_t>();
  if (has_bipartite > 1) throw IoError(path.string() + ": bad bipartite flag");
  if (has_bipartite) {
    uint64_t t = r.get<uint64_t>();
    BipartiteGraph bip;
    bip.query_out = read_csr(r, size_t(t), n, "bipartite query_out");
    bip.base_out = read_csr(r, size_t(n), t, "bipartite base_out");
    out.bipartite = std::move(bip);
  }
  r.expect_eof();
  return out;
}

}  // namespace roar
