#pragma once

#include <Eigen/Core>

#include <functional>
#include <thread>
#include <vector>

namespace twoarm::detail {

inline int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Static partition of [0, count) across workers. Each index owns its own
// state (rng stream, output slot), so the split cannot change results.
inline void parallel_for(Eigen::Index count, int threads,
                         const std::function<void(Eigen::Index)>& fn) {
  const int t = std::min<Eigen::Index>(resolve_threads(threads), count > 0 ? count : 1);
  if (t <= 1) {
    for (Eigen::Index i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(t));
  for (int k = 0; k < t; ++k) {
    const Eigen::Index begin = count * k / t;
    const Eigen::Index end = count * (k + 1) / t;
    workers.emplace_back([begin, end, &fn] {
      for (Eigen::Index i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& w : workers) w.join();
}

}  // namespace twoarm::detail
