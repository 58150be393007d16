#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace pldeg {

/// Worker count from PLDEG_THREADS, else the hardware concurrency.
inline unsigned thread_count() {
  if (const char* env = std::getenv("PLDEG_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(begin, end, chunk) over `chunks` contiguous slices of [0, n) and
/// returns the per-chunk results in slice order, so reductions over them do
/// not depend on the number of threads.
template <class T, class Body>
std::vector<T> parallel_chunks(std::size_t n, std::size_t chunks, Body&& body) {
  chunks = std::max<std::size_t>(1, std::min(chunks, n == 0 ? 1 : n));
  std::vector<T> out(chunks);
  auto run = [&](std::size_t c) {
    const std::size_t begin = n * c / chunks, end = n * (c + 1) / chunks;
    out[c] = body(begin, end, c);
  };
  const unsigned workers = std::min<unsigned>(thread_count(), static_cast<unsigned>(chunks));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run(c);
    return out;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t c = w; c < chunks; c += workers) run(c);
    });
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace pldeg
