#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops used by the likelihood and mixture code.
// Every kernel has a scalar reference implementation and, on x86-64 with
// AVX2+FMA, a vectorized variant. The backend is chosen once at startup
// (override with the EPVI_BACKEND environment variable or force_backend).
// SIMD variants may reorder reductions, so results can differ from the
// scalar reference by a few ulps; the equivalence tests bound that drift.

namespace epvi::kernels {

enum class Backend { scalar, avx2 };

struct Ops {
    // sum_i a[i]*b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // sum_i (a[i]-b[i])^2
    double (*squared_distance)(const double* a, const double* b, std::size_t n);
    // sum_i x[i]
    double (*sum)(const double* x, std::size_t n);
    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

// Active dispatch table. Resolved on first use.
const Ops& active();

Backend active_backend();
std::string_view backend_name();

// Returns false if the requested backend is unavailable on this CPU.
bool force_backend(Backend b);

bool cpu_has_avx2();

inline double dot(const double* a, const double* b, std::size_t n) {
    return active().dot(a, b, n);
}
inline double squared_distance(const double* a, const double* b, std::size_t n) {
    return active().squared_distance(a, b, n);
}
inline double sum(const double* x, std::size_t n) { return active().sum(x, n); }
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
    active().axpy(alpha, x, y, n);
}

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace scalar

#if defined(EPVI_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace avx2
#endif

}  // namespace epvi::kernels
