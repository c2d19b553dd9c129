#include "pnp/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace pnp {

namespace {
std::atomic<int> g_threads{1};
constexpr std::size_t kMinChunk = 512;
}  // namespace

void set_num_threads(int n) { g_threads.store(std::max(1, n)); }
int num_threads() { return g_threads.load(); }

std::size_t parallel_chunks(std::size_t n) {
  const auto workers = static_cast<std::size_t>(num_threads());
  if (workers <= 1 || n < 2 * kMinChunk) return 1;
  return std::min(workers, n / kMinChunk);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  parallel_for_chunked(n, [&](std::size_t, std::size_t begin, std::size_t end) { body(begin, end); });
}

void parallel_for_chunked(std::size_t n,
                          const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  const std::size_t chunks = parallel_chunks(n);
  if (chunks <= 1) {
    if (n > 0) body(0, 0, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> failures(chunks);
  pool.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = n * c / chunks;
    const std::size_t end = n * (c + 1) / chunks;
    pool.emplace_back([&, c, begin, end] {
      try {
        body(c, begin, end);
      } catch (...) {
        failures[c] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
}

}  // namespace pnp
