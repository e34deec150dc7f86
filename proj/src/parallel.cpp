#include "seqopt/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace seqopt {

namespace {
#ifdef _OPENMP
const int default_threads = omp_get_max_threads();
#endif
} // namespace

void set_thread_count(int n) {
#ifdef _OPENMP
    omp_set_num_threads(n > 0 ? n : default_threads);
#else
    (void)n;
#endif
}

int thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace seqopt
