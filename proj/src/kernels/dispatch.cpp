#include "epvi/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace epvi::kernels {

namespace {

constexpr Ops kScalarOps{scalar::dot, scalar::squared_distance, scalar::sum, scalar::axpy};

#if defined(EPVI_HAVE_AVX2)
constexpr Ops kAvx2Ops{avx2::dot, avx2::squared_distance, avx2::sum, avx2::axpy};
#endif

struct Dispatch {
    Ops ops;
    Backend backend;

    Dispatch() {
        backend = Backend::scalar;
        ops = kScalarOps;
#if defined(EPVI_HAVE_AVX2)
        if (cpu_has_avx2()) {
            backend = Backend::avx2;
            ops = kAvx2Ops;
        }
#endif
        if (const char* env = std::getenv("EPVI_BACKEND")) {
            if (std::strcmp(env, "scalar") == 0) {
                backend = Backend::scalar;
                ops = kScalarOps;
            }
            // "avx2" keeps the auto-detected table; it is never forced onto
            // a CPU that lacks the instructions.
        }
    }
};

Dispatch& dispatch() {
    static Dispatch d;
    return d;
}

}  // namespace

bool cpu_has_avx2() {
#if defined(EPVI_HAVE_AVX2)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Ops& active() { return dispatch().ops; }

Backend active_backend() { return dispatch().backend; }

std::string_view backend_name() {
    return dispatch().backend == Backend::avx2 ? "avx2" : "scalar";
}

bool force_backend(Backend b) {
    if (b == Backend::scalar) {
        dispatch().backend = Backend::scalar;
        dispatch().ops = kScalarOps;
        return true;
    }
#if defined(EPVI_HAVE_AVX2)
    if (cpu_has_avx2()) {
        dispatch().backend = Backend::avx2;
        dispatch().ops = kAvx2Ops;
        return true;
    }
#endif
    return false;
}

}  // namespace epvi::kernels
