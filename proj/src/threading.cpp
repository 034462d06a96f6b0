#include "biphoton/threading.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace biphoton {

namespace {
std::atomic<int> g_max_threads{0};
constexpr std::size_t kBlock = 8192;
}  // namespace

void set_max_threads(int n) { g_max_threads.store(n < 0 ? 0 : n); }

int max_threads() {
  const int cap = g_max_threads.load();
  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return cap == 0 ? hw : std::min(cap, hw);
}

void parallel_for_blocks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t n_blocks = (n + kBlock - 1) / kBlock;
  const int workers = std::min<std::size_t>(max_threads(), n_blocks);
  if (workers <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) fn(b * kBlock, std::min(n, (b + 1) * kBlock));
    return;
  }
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1))
      fn(b * kBlock, std::min(n, (b + 1) * kBlock));
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
}

}  // namespace biphoton
