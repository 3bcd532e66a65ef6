#pragma once

#include <cstddef>
#include <functional>

namespace extdesign {

/// Caps the number of worker threads used by parallel maps (0 = hardware concurrency).
void set_max_threads(unsigned n);
unsigned max_threads();

/// Calls fn(i) for i in [0, n) over contiguous chunks on worker threads. Each
/// index is visited exactly once; callers write to per-index slots and reduce
/// sequentially, so results do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace extdesign
