#pragma once

// central finite-difference oracles for model derivative checks

#include <cmath>
#include <vector>

#include "epvi/model.hpp"

namespace epvi::testutil {

inline std::vector<double> fd_gradient(const Model& m, std::vector<double> theta,
                                       double h = 1e-5) {
    std::vector<double> g(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double keep = theta[i];
        const double step = h * std::max(1.0, std::fabs(keep));
        theta[i] = keep + step;
        const double up = m.log_joint(theta);
        theta[i] = keep - step;
        const double down = m.log_joint(theta);
        theta[i] = keep;
        g[i] = (up - down) / (2.0 * step);
    }
    return g;
}

inline double fd_hessian_trace(const Model& m, std::vector<double> theta, double h = 1e-4) {
    double tr = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double keep = theta[i];
        const double step = h * std::max(1.0, std::fabs(keep));
        theta[i] = keep + step;
        const double up = m.grad(theta)[i];
        theta[i] = keep - step;
        const double down = m.grad(theta)[i];
        theta[i] = keep;
        tr += (up - down) / (2.0 * step);
    }
    return tr;
}

inline double rel_err(double got, double want) {
    return std::fabs(got - want) / std::max(std::fabs(want), 1e-10);
}

inline double grad_rel_err(std::span<const double> got, std::span<const double> want) {
    double diff = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        diff += (got[i] - want[i]) * (got[i] - want[i]);
        norm += want[i] * want[i];
    }
    return std::sqrt(diff) / std::max(std::sqrt(norm), 1e-10);
}

}  // namespace epvi::testutil
