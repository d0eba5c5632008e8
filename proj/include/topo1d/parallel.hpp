#pragma once

#include <cstddef>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace topo1d {

/// Caps the OpenMP team size used by every parallel kernel. n <= 0 restores the default.
void set_max_threads(int n);
int max_threads();

/// Runs body(i) for i in [0, n) across the OpenMP team. Each index is visited exactly
/// once, so kernels that write only to slot i produce identical results to a serial
/// loop. The first exception thrown by any body is rethrown on the calling thread.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  std::exception_ptr error;
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(topo1d_parallel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace topo1d
