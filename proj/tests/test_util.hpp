#pragma once

// Shared oracles for the numeric tests: naive density evaluation and grid
// quadrature, kept independent of the library's log-domain code paths.

#include <cmath>
#include <functional>
#include <vector>

#include "epvi/math.hpp"
#include "epvi/mixture.hpp"

namespace epvi::testutil {

inline MixtureApprox random_mixture(Rng& rng, int dim, int k, double mean_span = 1.5,
                                    double var_lo = 0.5, double var_hi = 2.0) {
    std::vector<GaussianComponent> comps;
    comps.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        GaussianComponent c;
        c.mean.resize(static_cast<std::size_t>(dim));
        for (auto& m : c.mean) m = mean_span * (2.0 * rng.uniform() - 1.0);
        c.variance = var_lo + (var_hi - var_lo) * rng.uniform();
        comps.push_back(std::move(c));
    }
    return MixtureApprox(dim, std::move(comps));
}

// direct-summation density of one isotropic Gaussian, no log-domain tricks
inline double naive_normal_pdf(std::span<const double> x, std::span<const double> mean,
                               double variance) {
    const auto d = x.size();
    double sq = 0.0;
    for (std::size_t i = 0; i < d; ++i) sq += (x[i] - mean[i]) * (x[i] - mean[i]);
    return std::pow(2.0 * 3.14159265358979323846 * variance, -0.5 * static_cast<double>(d)) *
           std::exp(-0.5 * sq / variance);
}

inline double naive_mixture_pdf(const MixtureApprox& q, std::span<const double> x) {
    double acc = 0.0;
    for (const auto& c : q.components()) acc += naive_normal_pdf(x, c.mean, c.variance);
    return acc / q.size();
}

// Axis-aligned evaluation grid covering every component out to `radius`
// standard deviations, at least `min_points` per axis.
struct Grid {
    int dim = 1;
    std::vector<double> lo;
    std::vector<double> hi;
    std::size_t points_per_axis = 0;

    double step(int axis) const {
        return (hi[static_cast<std::size_t>(axis)] - lo[static_cast<std::size_t>(axis)]) /
               static_cast<double>(points_per_axis - 1);
    }
    double cell_volume() const {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= step(a);
        return v;
    }
};

inline Grid pooled_grid(std::span<const MixtureApprox> mixtures, double radius = 8.0,
                        std::size_t min_points = 401) {
    const int dim = mixtures[0].dim();
    Grid g;
    g.dim = dim;
    g.lo.assign(static_cast<std::size_t>(dim), 1e300);
    g.hi.assign(static_cast<std::size_t>(dim), -1e300);
    for (const auto& q : mixtures) {
        for (const auto& c : q.components()) {
            const double sd = std::sqrt(c.variance);
            for (int a = 0; a < dim; ++a) {
                g.lo[static_cast<std::size_t>(a)] =
                    std::min(g.lo[static_cast<std::size_t>(a)], c.mean[static_cast<std::size_t>(a)] - radius * sd);
                g.hi[static_cast<std::size_t>(a)] =
                    std::max(g.hi[static_cast<std::size_t>(a)], c.mean[static_cast<std::size_t>(a)] + radius * sd);
            }
        }
    }
    g.points_per_axis = min_points;
    return g;
}

// Riemann sum of f over the grid (d = 1 or 2)
inline double grid_integrate(const Grid& g,
                             const std::function<double(std::span<const double>)>& f) {
    const double vol = g.cell_volume();
    double acc = 0.0;
    if (g.dim == 1) {
        double x[1];
        for (std::size_t i = 0; i < g.points_per_axis; ++i) {
            x[0] = g.lo[0] + static_cast<double>(i) * g.step(0);
            acc += f({x, 1});
        }
    } else if (g.dim == 2) {
        double x[2];
        for (std::size_t i = 0; i < g.points_per_axis; ++i) {
            x[0] = g.lo[0] + static_cast<double>(i) * g.step(0);
            for (std::size_t j = 0; j < g.points_per_axis; ++j) {
                x[1] = g.lo[1] + static_cast<double>(j) * g.step(1);
                acc += f({x, 2});
            }
        }
    } else {
        throw std::invalid_argument("grid_integrate: only d <= 2 supported");
    }
    return acc * vol;
}

}  // namespace epvi::testutil
