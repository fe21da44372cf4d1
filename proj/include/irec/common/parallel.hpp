#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace irec {

// Runs body(begin, end) over contiguous chunks of [0, n) on up to `threads`
// threads. Chunk boundaries only affect scheduling, never results, as long as
// body writes disjoint outputs.
template <typename Body>
void parallel_chunks(std::size_t n, std::size_t threads, Body&& body) {
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    body(std::size_t{0}, n);
    return;
  }
  const std::size_t chunk = (n + threads - 1) / threads;
  std::vector<std::jthread> workers;
  for (std::size_t begin = 0; begin < n; begin += chunk) {
    const std::size_t end = std::min(n, begin + chunk);
    workers.emplace_back([&body, begin, end] { body(begin, end); });
  }
}

}  // namespace irec
