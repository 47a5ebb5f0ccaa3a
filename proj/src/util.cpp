#include "hodgeflow/util.hpp"

#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace hodgeflow {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 s(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
  return s.next();
}

int thread_cap() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const char* env = std::getenv("HODGEFLOW_THREADS");
  if (env == nullptr || *env == '\0') return int(hw);
  long v = std::strtol(env, nullptr, 10);
  if (v <= 0) return int(hw);  // 0 = auto
  return int(v);
}

void parallel_for_indices(int n, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  int workers = thread_cap();
  if (workers > n) workers = n;
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  pool.reserve(std::size_t(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (int i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[std::size_t(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace hodgeflow
