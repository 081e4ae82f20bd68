#pragma once

#include <algorithm>
#include <cstddef>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>
#include <tbb/partitioner.h>

namespace dlp {

/// Calls body(chunk_index, begin, end) for fixed chunks of [0, n). The chunk
/// boundaries depend only on n and chunk, never on the number of workers, so
/// per-chunk results reduced in chunk order are reproducible.
template <class Body>
void for_each_chunk(std::size_t n, std::size_t chunk, Body&& body) {
  if (n == 0) return;
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t n_chunks = (n + chunk - 1) / chunk;
  tbb::parallel_for(
      tbb::blocked_range<std::size_t>(0, n_chunks, 1),
      [&](const tbb::blocked_range<std::size_t>& r) {
        for (std::size_t c = r.begin(); c != r.end(); ++c) {
          const std::size_t begin = c * chunk;
          body(c, begin, std::min(n, begin + chunk));
        }
      },
      tbb::simple_partitioner{});
}

inline std::size_t chunk_count(std::size_t n, std::size_t chunk) {
  return n == 0 ? 0 : (n + chunk - 1) / chunk;
}

/// Caps the worker count for the lifetime of the process (0 keeps the default).
void set_max_threads(std::size_t n);

}  // namespace dlp
