#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace vlw {

// Kernels that fan out over cells or cubes take an Execution tag. The serial
// path is the reference the parallel path is tested against; both write into
// pre-sized outputs by index, so results are bit-identical.
enum class Execution { serial, parallel };

void set_thread_count(int threads);
int thread_count();

/// Runs body(i) for i in [0, count). Exceptions thrown by iterations are
/// collected and the one with the lowest index is rethrown, so failures are
/// reported the same way under both execution modes.
template <class Body>
void for_each_index(std::size_t count, Execution exec, Body&& body) {
  if (exec == Execution::serial || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  const long long n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace vlw
