#ifndef CATLAB_PARALLEL_HPP
#define CATLAB_PARALLEL_HPP

#include <cstdlib>
#include <future>
#include <thread>
#include <vector>

namespace catlab {

// Worker cap: CAT_LAB_THREADS when set, else the hardware count (at most 8).
// A cap of 1 means run inline.
inline std::size_t worker_count() {
  if (const char* env = std::getenv("CAT_LAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : std::min<std::size_t>(hw, 8);
}

// Runs fn(task_index) for every index. Task decomposition is fixed by the
// caller, so results are identical whatever the worker cap is.
template <typename Fn>
void run_tasks(std::size_t n_tasks, Fn&& fn) {
  const std::size_t workers = std::min(worker_count(), n_tasks);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n_tasks; ++i) fn(i);
    return;
  }
  std::vector<std::future<void>> futures;
  futures.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&fn, w, workers, n_tasks] {
      for (std::size_t i = w; i < n_tasks; i += workers) fn(i);
    }));
  }
  for (auto& f : futures) f.get();
}

}  // namespace catlab

#endif
