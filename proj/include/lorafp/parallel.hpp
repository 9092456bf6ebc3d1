#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lorafp {

// Worker count used by the OpenMP kernels. 0 = library default (all cores).
void set_jobs(int jobs);
int jobs();

// Floating-point reductions in result paths are always accumulated serially over
// precomputed per-element values, so every result in this library is bit-identical
// for any jobs() setting. Tests rely on that.

}  // namespace lorafp
