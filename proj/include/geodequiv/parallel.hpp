#pragma once

#include <cstddef>

namespace geodequiv {

/// Number of OpenMP workers to use: omp_get_max_threads(), capped by the
/// GEODEQUIV_THREADS environment variable when it holds a positive integer.
int worker_count();

/// Overrides the worker count for subsequent kernels (0 restores the default).
void set_worker_count(int n);

}  // namespace geodequiv
