#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

namespace epvi {

inline constexpr double kLog2Pi = 1.8378770664093454836;

double log_sum_exp(std::span<const double> v);

// log N_d(x | mean, variance * I_d)
double log_normal_iso(std::span<const double> x, std::span<const double> mean,
                      double variance);

inline double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// log(1 + e^x) without overflow
inline double softplus(double x) {
    const double m = x > 0.0 ? x : 0.0;
    return m + std::log1p(std::exp(-std::fabs(x)));
}

// log sigmoid(x) = -softplus(-x)
inline double log_sigmoid(double x) { return -softplus(-x); }

// Deterministic random stream. All draws go through explicitly coded
// transforms (never std::*_distribution, whose output is
// implementation-defined), so identical seeds give identical artifacts
// across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // uniform integer in {0, ..., n-1}, unbiased by rejection
    std::uint64_t bounded(std::uint64_t n) {
        const std::uint64_t threshold = (-n) % n;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= threshold) return r % n;
        }
    }

    // standard normal via Box-Muller (one spare cached per stream)
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    double exponential(double rate) { return -std::log(1.0 - uniform()) / rate; }

    // Gamma(shape, rate) by Marsaglia-Tsang squeeze
    double gamma(double shape, double rate);

    // derive an independent stream seed for a labelled substream
    static std::uint64_t derive(std::uint64_t master, std::uint64_t stream);

  private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace epvi
