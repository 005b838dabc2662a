#include "feilab/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef FEILAB_HAVE_OPENMP
#include <omp.h>
#endif

namespace feilab {

bool parallel_enabled() {
#ifdef FEILAB_HAVE_OPENMP
    return true;
#else
    return false;
#endif
}

int resolve_jobs(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("FEI_LAB_JOBS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v > 0 && v < 1024) return static_cast<int>(v);
    }
#ifdef FEILAB_HAVE_OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace feilab
