#pragma once
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace icsr {

// Resolve a thread-count request: explicit value wins, then ICSR_THREADS,
// then hardware concurrency.
int resolve_threads(int requested);

// Run body(begin, end) over contiguous chunks of [0, n). Each index is
// owned by exactly one chunk, so writers into preallocated slots are
// deterministic regardless of thread count.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace icsr
