#include "pvsurf/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace pvsurf {

namespace {
std::atomic<int> g_threads{0};
}

void set_threads(int n) { g_threads.store(n < 0 ? 0 : n); }

int thread_count() {
  const int n = g_threads.load();
  if (n > 0) return n;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : int(hw);
}

std::size_t parallel_chunk_count(std::size_t n) { return std::min<std::size_t>(n, 64); }

void parallel_for_chunks(std::size_t n,
                         const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  // fixed chunk grid independent of worker count
  const std::size_t chunks = parallel_chunk_count(n);
  const std::size_t per = (n + chunks - 1) / chunks;
  const int workers = int(std::min<std::size_t>(std::size_t(std::max(1, thread_count())), chunks));
  if (workers == 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      const std::size_t b = c * per;
      const std::size_t e = std::min(n, b + per);
      if (b < e) fn(c, b, e);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(std::size_t(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t c = next.fetch_add(1);
        if (c >= chunks) return;
        const std::size_t b = c * per;
        const std::size_t e = std::min(n, b + per);
        if (b < e) fn(c, b, e);
      }
    });
  }
  for (auto& t : pool) t.join();
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
  parallel_for_chunks(n, [&fn](std::size_t, std::size_t b, std::size_t e) { fn(b, e); });
}

}  // namespace pvsurf
