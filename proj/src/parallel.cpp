#include "astar/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace astar {

namespace {
std::atomic<int> g_jobs{1};
}

int jobs() { return g_jobs.load(); }

void set_jobs(int n) { g_jobs.store(std::max(1, n)); }

void parallel_for(int n, const std::function<void(int)>& body) {
  const int workers = std::min(jobs(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    const int lo = static_cast<int>(static_cast<long>(n) * t / workers);
    const int hi = static_cast<int>(static_cast<long>(n) * (t + 1) / workers);
    pool.emplace_back([&, lo, hi] {
      try {
        for (int i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first) first = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace astar
