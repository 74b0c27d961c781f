#pragma once

#include <cstddef>
#include <functional>

namespace bodyfield {

/// Number of workers used by parallel_for. 0 means hardware concurrency.
void set_thread_count(unsigned count);
unsigned thread_count();

/// Splits [0, count) into contiguous chunks and runs body(begin, end) on each.
/// Chunk boundaries depend only on count and grain, never on the worker
/// count, so any per-chunk reduction done by the caller is deterministic.
void parallel_for(std::size_t count, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace bodyfield
