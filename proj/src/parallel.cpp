#include "schwinger/parallel.hpp"

#include <algorithm>
#include <cstdlib>

extern "C" void openblas_set_num_threads(int);

namespace schwinger {

unsigned default_workers() {
  if (const char* env = std::getenv("SCHWINGER_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void single_threaded_blas() { openblas_set_num_threads(1); }

}  // namespace schwinger
