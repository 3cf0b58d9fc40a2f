#include "seo/parallel.hpp"

#include <omp.h>

namespace seo {

namespace {
const int kDefaultWorkers = omp_get_max_threads();
}

void set_worker_count(int jobs) { omp_set_num_threads(jobs > 0 ? jobs : kDefaultWorkers); }

int worker_count() { return omp_get_max_threads(); }

}  // namespace seo
