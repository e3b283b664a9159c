#include <doctest.h>

#include <cmath>
#include <vector>

#include "epvi/kernels.hpp"
#include "epvi/math.hpp"

using namespace epvi;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double scale = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = scale * rng.normal();
    return v;
}

// lengths chosen to hit every tail path of the 8/4-wide loops
const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 12, 15, 16, 17, 31, 32, 33, 100, 1023};

}  // namespace

TEST_CASE("scalar kernels match straightforward definitions") {
    Rng rng(11);
    const auto a = random_vec(rng, 9);
    const auto b = random_vec(rng, 9);
    double dot = 0, sq = 0, sum = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        sq += (a[i] - b[i]) * (a[i] - b[i]);
        sum += a[i];
    }
    CHECK(kernels::scalar::dot(a.data(), b.data(), a.size()) == doctest::Approx(dot).epsilon(1e-15));
    CHECK(kernels::scalar::squared_distance(a.data(), b.data(), a.size()) ==
          doctest::Approx(sq).epsilon(1e-15));
    CHECK(kernels::scalar::sum(a.data(), a.size()) == doctest::Approx(sum).epsilon(1e-15));

    auto y = b;
    kernels::scalar::axpy(0.5, a.data(), y.data(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(y[i] == doctest::Approx(b[i] + 0.5 * a[i]).epsilon(1e-15));
}

TEST_CASE("avx2 variants agree with the scalar reference") {
    if (!kernels::cpu_has_avx2()) {
        MESSAGE("no AVX2 on this CPU, skipping equivalence checks");
        return;
    }
#if defined(EPVI_HAVE_AVX2)
    Rng rng(202);
    for (const std::size_t n : kLengths) {
        CAPTURE(n);
        const auto a = random_vec(rng, n, 2.0);
        const auto b = random_vec(rng, n, 2.0);

        const double d_ref = kernels::scalar::dot(a.data(), b.data(), n);
        const double d_simd = kernels::avx2::dot(a.data(), b.data(), n);
        CHECK(std::fabs(d_simd - d_ref) <= 1e-12 * (1.0 + std::fabs(d_ref)));

        const double s_ref = kernels::scalar::squared_distance(a.data(), b.data(), n);
        const double s_simd = kernels::avx2::squared_distance(a.data(), b.data(), n);
        CHECK(std::fabs(s_simd - s_ref) <= 1e-12 * (1.0 + s_ref));

        const double t_ref = kernels::scalar::sum(a.data(), n);
        const double t_simd = kernels::avx2::sum(a.data(), n);
        CHECK(std::fabs(t_simd - t_ref) <= 1e-12 * (1.0 + std::fabs(t_ref)));

        auto y_ref = b;
        auto y_simd = b;
        kernels::scalar::axpy(-1.7, a.data(), y_ref.data(), n);
        kernels::avx2::axpy(-1.7, a.data(), y_simd.data(), n);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(y_simd[i] == doctest::Approx(y_ref[i]).epsilon(1e-14));
    }
#endif
}

TEST_CASE("dispatch honors forced backends") {
    const auto original = kernels::active_backend();

    REQUIRE(kernels::force_backend(kernels::Backend::scalar));
    CHECK(kernels::backend_name() == "scalar");
    const double a[3] = {1, 2, 3};
    const double b[3] = {4, 5, 6};
    CHECK(kernels::dot(a, b, 3) == doctest::Approx(32.0));

    if (kernels::cpu_has_avx2()) {
        REQUIRE(kernels::force_backend(kernels::Backend::avx2));
        CHECK(kernels::backend_name() == "avx2");
        CHECK(kernels::dot(a, b, 3) == doctest::Approx(32.0));
    } else {
        CHECK_FALSE(kernels::force_backend(kernels::Backend::avx2));
    }

    kernels::force_backend(original);
}
