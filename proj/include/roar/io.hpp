#pragma once

#include <filesystem>
#include <optional>

#include "roar/graph.hpp"
#include "roar/types.hpp"

namespace roar {

// All files are little-endian and bit-exact.
//
// Vector files share one layout:
//   count: u32 | dim: u32 | payload: count*dim elements
// with element type f32 (.fbin), u8 (.u8bin) or u32 (.ibin).
//
// Ground-truth files are two concatenated blocks, each with its own
// header: an id block (u32 elements) followed by a distance block (f32
// elements) with identical count/dim. Rows must be sorted ascending by
// distance with distinct ids.
//
// Index files (format version 1):
//   magic "ROAR" | version: u32 | metric: u8 | dim: u32 | N: u64
//   | medoid: u64 | nq,m,l: u32 each
//   | adjacency CSR: offsets (N+1) u64, neighbor ids u32
//   | tombstone bitmap: ceil(N/8) bytes, node i at bit (i & 7) of byte i/8
//   | bipartite flag: u8
//   | if flag: T: u64, query->base CSR (offsets (T+1) u64, ids u32),
//              base->query CSR (offsets (N+1) u64, ids u32)

/// Loads an .fbin, attaches the metric, rejects NaN/Inf, and normalizes
/// rows when the metric is cosine.
VectorSet read_fbin(const std::filesystem::path& path, Metric metric = Metric::L2);
void write_fbin(const VectorSet& set, const std::filesystem::path& path);

/// .u8bin values are widened to f32. write_u8bin requires every value to
/// be an integer in [0, 255].
VectorSet read_u8bin(const std::filesystem::path& path, Metric metric = Metric::L2);
void write_u8bin(const VectorSet& set, const std::filesystem::path& path);

std::vector<uint32_t> read_ibin(const std::filesystem::path& path, uint32_t* dim_out = nullptr,
                                size_t* count_out = nullptr);
void write_ibin(std::span<const uint32_t> values, size_t count, uint32_t dim,
                const std::filesystem::path& path);

GroundTruth read_gt(const std::filesystem::path& path);
void write_gt(const GroundTruth& gt, const std::filesystem::path& path);

/// Persists the index and, when given, the bipartite graph that built it
/// (needed later for offline insertion). save(load(f)) is byte-identical
/// to f.
void save_index(const RoarIndex& index, const BipartiteGraph* bipartite,
                const std::filesystem::path& path);

struct LoadedIndex {
  RoarIndex index;
  std::optional<BipartiteGraph> bipartite;
};

LoadedIndex load_index(const std::filesystem::path& path);

}  // namespace roar
