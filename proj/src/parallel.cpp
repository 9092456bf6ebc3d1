#include "lorafp/parallel.hpp"

namespace lorafp {

namespace {
int g_jobs = 0;
}

void set_jobs(int n) {
    g_jobs = n > 0 ? n : 0;
#ifdef _OPENMP
    omp_set_num_threads(n > 0 ? n : omp_get_num_procs());
#endif
}

int jobs() {
#ifdef _OPENMP
    return g_jobs > 0 ? g_jobs : omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace lorafp
