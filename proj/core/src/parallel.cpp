#include "rplap/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rplap {

namespace {
thread_local bool inside_parallel = false;
}

int worker_count() {
  if (const char* env = std::getenv("RENORM_PLAP_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  const int workers = worker_count();
  if (n <= 1 || workers == 1 || inside_parallel) {
    const bool saved = inside_parallel;
    inside_parallel = true;
    for (int i = 0; i < n; ++i) fn(i);
    inside_parallel = saved;
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&] {
    inside_parallel = true;
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int spawn = std::min(workers, n);
  pool.reserve(static_cast<size_t>(spawn));
  for (int w = 0; w < spawn; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace rplap
