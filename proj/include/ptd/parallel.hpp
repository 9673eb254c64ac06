#pragma once

#include <cstddef>
#include <functional>

namespace ptd {

/// Worker count: PTD_THREADS if set to a positive integer, else the hardware
/// concurrency (at least 1).
int thread_count();

/// Runs body(begin, end) over [0, n) split into contiguous chunks of at least
/// `grain` items. Chunks write disjoint outputs, so results never depend on
/// the worker count.
void parallel_for(std::size_t n, std::size_t grain, const std::function<void(std::size_t, std::size_t)>& body);

/// Like parallel_for, but body always sees the fixed blocks [b * block,
/// min(n, (b + 1) * block)), so batch composition is independent of threads.
void parallel_blocks(std::size_t n, std::size_t block, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace ptd
