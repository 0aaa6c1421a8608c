#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace uigp::detail {

/// Runs fn(i) for i in [0, count) on up to `threads` workers in contiguous
/// index chunks. Each index owns its output slot, so results are identical
/// for any thread count; the first exception is rethrown after joining.
inline void parallel_for_index(Eigen::Index count, int threads, const std::function<void(Eigen::Index)>& fn) {
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (workers == 1) {
    for (Eigen::Index i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const Eigen::Index chunk = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const Eigen::Index begin = w * chunk;
    const Eigen::Index end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        for (Eigen::Index i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace uigp::detail
