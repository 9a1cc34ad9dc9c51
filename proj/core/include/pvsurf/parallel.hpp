#pragma once

#include <cstddef>
#include <functional>

namespace pvsurf {

// Data-parallelism cap used by grid loops; 0 restores the hardware default.
void set_threads(int n);
int thread_count();

// Number of chunks parallel loops split [0, n) into; depends only on n.
std::size_t parallel_chunk_count(std::size_t n);

// Runs fn(chunk, begin, end) over [0, n) split into chunks whose layout
// depends only on n (not on the thread count), so pure-map workloads and
// chunk-indexed reductions stay bitwise deterministic under any schedule.
void parallel_for_chunks(std::size_t n,
                         const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

// Convenience wrapper dropping the chunk index.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace pvsurf
