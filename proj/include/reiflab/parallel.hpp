#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace reiflab {

/// Worker count: REIFLAB_JOBS when set, otherwise the hardware concurrency.
inline int default_jobs()
{
  if (const char* env = std::getenv("REIFLAB_JOBS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0)
        return n;
    } catch (const std::exception&) {
    }
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

inline int resolve_jobs(int requested)
{
  if (std::getenv("REIFLAB_JOBS"))
    return default_jobs();
  return requested > 0 ? requested : default_jobs();
}

/// Runs f(i) for i in [0, n). Results must be written to per-index slots so
/// the outcome does not depend on the worker count.
template <typename F>
void parallel_for(std::size_t n, int jobs, F&& f)
{
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n)
        return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error)
          error = std::current_exception();
        next = n;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back(body);
  }
  if (error)
    std::rethrow_exception(error);
}

} // namespace reiflab
