#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <future>
#include <thread>
#include <vector>

namespace hermlab {

// Runs f(0..count-1) on a few std::async workers. Results must be written to
// per-index slots so the caller can reduce them in a fixed order. The first
// exception (by index) is rethrown.
template <class F>
void parallel_for(std::size_t count, F f) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  std::size_t workers = std::min<std::size_t>(hw, count);
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) f(k);
    return;
  }
  std::vector<std::exception_ptr> errs(count);
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w)
    jobs.push_back(std::async(std::launch::async, [&] {
      for (std::size_t k; (k = next++) < count;) {
        try {
          f(k);
        } catch (...) {
          errs[k] = std::current_exception();
        }
      }
    }));
  for (auto& j : jobs) j.get();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace hermlab
