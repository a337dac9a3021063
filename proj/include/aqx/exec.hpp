#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>

#include <omp.h>

namespace aqx {

/// Execution policy for the data-parallel kernels. `serial` is the reference
/// path kept for testing; both paths write results into index-addressed slots,
/// so their outputs are bit-identical.
enum class Exec { serial, parallel };

/// Runs body(i) for i in [0, n). Exceptions thrown inside the OpenMP region
/// are captured and the first one is rethrown after the loop.
template <class Body>
void for_each_index(std::size_t n, Exec exec, Body&& body) {
  if (exec == Exec::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first;
  std::mutex guard;
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
}

inline void set_thread_cap(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

}  // namespace aqx
