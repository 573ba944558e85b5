#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace chordstats {

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs body(chunk_index) for chunk_index in [0, chunks) on up to `threads`
/// workers. Chunks are claimed dynamically; callers that need ordered output
/// store results by chunk index. The first exception thrown by a worker is
/// rethrown on the calling thread.
template <class Body>
void for_each_chunk(std::size_t chunks, unsigned threads, Body&& body) {
  const unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(resolve_threads(threads), chunks));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(c, 0u);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t c = next.fetch_add(1); c < chunks;
             c = next.fetch_add(1)) {
          body(c, w);
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(chunks);
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Half-open range of item indices covered by chunk `c` when `items` are
/// split into `chunks` contiguous pieces.
struct ChunkRange {
  std::size_t begin;
  std::size_t end;
};

inline ChunkRange chunk_range(std::size_t items, std::size_t chunks,
                              std::size_t c) {
  const std::size_t base = items / chunks;
  const std::size_t extra = items % chunks;
  const std::size_t begin = c * base + std::min(c, extra);
  return {begin, begin + base + (c < extra ? 1 : 0)};
}

}  // namespace chordstats
