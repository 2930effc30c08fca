#include "sgm/parallel.hpp"

#include <atomic>

namespace sgm {

namespace {
std::atomic<int> g_threads{0};
}

int default_threads() {
  const int t = g_threads.load();
  if (t > 0) return t;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void set_default_threads(int threads) { g_threads.store(threads > 0 ? threads : 0); }

int resolve_threads(int requested) { return requested > 0 ? requested : default_threads(); }

}  // namespace sgm
