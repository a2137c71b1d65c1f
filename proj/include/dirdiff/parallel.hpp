#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace dirdiff {

/// Worker-count setting threaded through the data-parallel scans.
struct Parallel {
  /// 0 means "use std::thread::hardware_concurrency()".
  unsigned jobs = 0;

  unsigned resolved() const noexcept {
    if (jobs > 0) return jobs;
    return std::max(1u, std::thread::hardware_concurrency());
  }
};

/// Splits [0, count) into at most `par.resolved()` contiguous chunks and runs
/// body(chunk_index, begin, end) for each, one thread per chunk. Chunk
/// boundaries depend only on (count, chunks), so callers that reduce per-chunk
/// results in chunk order get results independent of scheduling.
template <class Body>
void parallel_chunks(std::size_t count, std::size_t chunks, Body&& body) {
  if (count == 0) return;
  chunks = std::clamp<std::size_t>(chunks, 1, count);
  auto bounds = [&](std::size_t c) { return count * c / chunks; };
  if (chunks == 1) {
    body(std::size_t{0}, std::size_t{0}, count);
    return;
  }
  std::vector<std::exception_ptr> errors(chunks);
  std::vector<std::thread> threads;
  threads.reserve(chunks - 1);
  auto run = [&](std::size_t c) {
    try {
      body(c, bounds(c), bounds(c + 1));
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };
  for (std::size_t c = 1; c < chunks; ++c) threads.emplace_back(run, c);
  run(0);
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Index-parallel loop: body(i) for every i in [0, count).
template <class Body>
void parallel_for(std::size_t count, const Parallel& par, Body&& body) {
  parallel_chunks(count, par.resolved(), [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) body(i);
  });
}

}  // namespace dirdiff
