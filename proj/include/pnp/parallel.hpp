#pragma once

#include <cstddef>
#include <functional>

namespace pnp {

/// Caps the worker count used by element loops. Values < 1 are clamped to 1.
void set_num_threads(int n);
int num_threads();

/// Splits [0, n) into contiguous chunks, one per worker, and calls
/// body(begin, end) for each. Chunk boundaries depend on the thread count;
/// callers that reduce must combine per-chunk results in chunk order.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

/// As parallel_for, with the chunk index passed first.
void parallel_for_chunked(std::size_t n,
                          const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

/// Number of chunks parallel_for will use for a range of size n.
std::size_t parallel_chunks(std::size_t n);

}  // namespace pnp
