#include "ruelle/parallel.hpp"

#include <atomic>

namespace ruelle {

namespace {
std::atomic<int> g_threads{1};
}

namespace detail {
bool& in_parallel_region() {
  thread_local bool flag = false;
  return flag;
}
}  // namespace detail

int thread_count() { return g_threads.load(); }

void set_thread_count(int n) {
  if (n <= 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  g_threads.store(n);
}

}  // namespace ruelle
