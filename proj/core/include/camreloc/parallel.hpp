#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace camreloc {

/// Run fn(i) for i in [0, n) across hardware threads. Each index is processed
/// exactly once and results must be written to per-index slots, which keeps
/// output independent of the scheduling.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                         unsigned thread_cap = 0) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (thread_cap != 0 && thread_cap < hw) hw = thread_cap;
  if (n <= 1 || hw <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  const unsigned count = static_cast<unsigned>(std::min<std::size_t>(hw, n));
  for (unsigned t = 0; t < count; ++t) {
    workers.emplace_back([t, count, n, &fn] {
      for (std::size_t i = t; i < n; i += count) fn(i);
    });
  }
  for (auto& w : workers) w.join();
}

}  // namespace camreloc
