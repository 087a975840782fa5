#pragma once

#include <cstddef>
#include <functional>

namespace fraclap {

/// Number of worker threads used by parallel_for (default: hardware concurrency).
void set_thread_count(unsigned count);
unsigned thread_count();

/// Calls body(i) for every i in [begin, end). Indices are split into contiguous
/// blocks; each index is processed exactly once, so results written per index
/// do not depend on the schedule.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& body);

}  // namespace fraclap
