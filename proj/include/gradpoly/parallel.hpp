#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gradpoly {

// Execution mode for the batch kernels.  Serial is the reference
// implementation; parallel runs the same per-index body under OpenMP.
// Results are required to be bit-identical across modes and worker counts:
// each index writes only its own output slot and reductions happen in a
// serial pass afterwards.
enum class ExecMode { serial, parallel };

int default_workers();
void set_default_workers(int workers);

template <class Fn>
void for_each_index(std::size_t n, ExecMode mode, Fn&& fn, int workers = 0) {
#ifdef _OPENMP
  if (mode == ExecMode::parallel) {
    const int w = workers > 0 ? workers : default_workers();
#pragma omp parallel for schedule(static) num_threads(w)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      fn(static_cast<std::size_t>(i));
    }
    return;
  }
#else
  (void)mode;
  (void)workers;
#endif
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

}  // namespace gradpoly
