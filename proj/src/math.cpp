#include "epvi/math.hpp"

#include <algorithm>
#include <limits>

#include "epvi/kernels.hpp"

namespace epvi {

double log_sum_exp(std::span<const double> v) {
    if (v.empty()) return -std::numeric_limits<double>::infinity();
    const double m = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(m)) return m;  // all -inf, or a nan/inf poisoned input
    double acc = 0.0;
    for (const double x : v) acc += std::exp(x - m);
    return m + std::log(acc);
}

double log_normal_iso(std::span<const double> x, std::span<const double> mean,
                      double variance) {
    const double d = static_cast<double>(x.size());
    const double sq = kernels::squared_distance(x.data(), mean.data(), x.size());
    return -0.5 * d * (kLog2Pi + std::log(variance)) - 0.5 * sq / variance;
}

double Rng::gamma(double shape, double rate) {
    if (shape < 1.0) {
        // boost to shape+1, then scale by U^(1/shape)
        const double g = gamma(shape + 1.0, 1.0);
        const double u = 1.0 - uniform();
        return g * std::pow(u, 1.0 / shape) / rate;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = 1.0 - uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
}

std::uint64_t Rng::derive(std::uint64_t master, std::uint64_t stream) {
    // splitmix64 finalizer over the pair
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace epvi
