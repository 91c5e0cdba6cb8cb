#include "geodequiv/parallel.hpp"

#include <omp.h>

#include <atomic>
#include <cstdlib>

namespace geodequiv {

namespace {
std::atomic<int> g_override{0};
}

int worker_count() {
    if (const int o = g_override.load(); o > 0) return o;
    int n = omp_get_max_threads();
    if (const char* env = std::getenv("GEODEQUIV_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap > 0 && cap < n) n = static_cast<int>(cap);
    }
    return n < 1 ? 1 : n;
}

void set_worker_count(int n) { g_override.store(n > 0 ? n : 0); }

}  // namespace geodequiv
