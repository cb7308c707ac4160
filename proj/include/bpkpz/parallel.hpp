#pragma once

#include <cstdint>
#include <exception>
#include <mutex>

namespace bpkpz {

/// Threads used by parallel regions; 0 means the OpenMP default.
void set_num_threads(int n);
int num_threads();

/// Runs f(i) for i in [0, n), in parallel when `parallel` is set. The first
/// exception thrown by any iteration is rethrown on the calling thread.
template <class F>
void parallel_for(std::int64_t n, bool parallel, F&& f) {
  std::exception_ptr err;
  std::mutex m;
#pragma omp parallel for schedule(dynamic) if (parallel) num_threads(num_threads())
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      f(i);
    } catch (...) {
      std::lock_guard lock(m);
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace bpkpz
