#pragma once

#include <cstddef>
#include <functional>

namespace jumprl {

/// Worker count: JUMPRL_THREADS when set and positive, otherwise the
/// hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunk boundaries
/// depend only on n and the worker count, and callers write into per-index
/// slots, so reductions done afterwards in index order are deterministic.
/// Exceptions from a chunk are rethrown on the calling thread (first chunk
/// index wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_per_worker = 1);

}  // namespace jumprl
