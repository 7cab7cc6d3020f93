#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace roar {

/// Runs fn(i) for i in [begin, end), split into contiguous chunks across
/// `threads` workers. threads <= 1 runs inline and is the determinism
/// reference; chunking never changes per-index results.
template <class F>
void parallel_for(size_t begin, size_t end, int threads, F&& fn) {
  if (end <= begin) return;
  size_t n = end - begin;
  if (threads <= 1 || n == 1) {
    for (size_t i = begin; i < end; ++i) fn(i);
    return;
  }
  size_t workers = std::min<size_t>(size_t(threads), n);
  size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex err_mu;
  for (size_t w = 0; w < workers; ++w) {
    size_t lo = begin + w * chunk;
    size_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> g(err_mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace roar
