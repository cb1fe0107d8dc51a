#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace multivariance {

// Worker count: MULTIVARIANCE_THREADS caps (and can raise) the default of
// hardware_concurrency.
inline int worker_count() {
  unsigned hw = std::thread::hardware_concurrency();
  int n = hw == 0 ? 1 : static_cast<int>(hw);
  if (const char* env = std::getenv("MULTIVARIANCE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = cap;
  }
  return n;
}

// Runs fn(i) for i in [0, total) across workers. Results must be written to
// index-addressed storage by the caller; chunk order is unspecified.
template <class Fn>
void parallel_for(int total, Fn&& fn) {
  const int workers = std::min(worker_count(), total);
  if (workers <= 1) {
    for (int i = 0; i < total; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < total; i += workers) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace multivariance
