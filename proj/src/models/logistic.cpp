#include "epvi/models/logistic.hpp"

#include <cmath>

#include "epvi/kernels.hpp"
#include "epvi/math.hpp"

namespace epvi::models {

LogisticModel::LogisticModel(LogisticModelConfig config, DataShard shard,
                             double prior_temper)
    : Model(config.V + 1, prior_temper), config_(config), shard_(std::move(shard)) {
    if (config_.V < 1) throw std::invalid_argument("LogisticModel: V must be >= 1");
    if (!(config_.prior_shape > 0.0) || !(config_.prior_rate > 0.0))
        throw std::invalid_argument("LogisticModel: Gamma hyperparameters must be positive");
    if (shard_.block.features != config_.V || shard_.block.outputs != 1)
        throw std::invalid_argument("LogisticModel: shard rows must have V features and one label");
    row_sqnorm_.resize(shard_.block.rows);
    for (std::size_t r = 0; r < shard_.block.rows; ++r) {
        const auto x = shard_.block.x_row(r);
        row_sqnorm_[r] = kernels::dot(x.data(), x.data(), x.size());
        const double y = shard_.block.y[r];
        if (y != 0.0 && y != 1.0)
            throw std::invalid_argument("LogisticModel: labels must be 0 or 1");
    }
}

double LogisticModel::log_joint(std::span<const double> theta) const {
    check_dim(theta);
    const int V = config_.V;
    const auto w = theta.first(static_cast<std::size_t>(V));
    const double t = theta[static_cast<std::size_t>(V)];
    const double alpha = std::exp(t);
    const double a = config_.prior_shape;
    const double b = config_.prior_rate;

    const double w_sq = kernels::dot(w.data(), w.data(), w.size());
    // log Gamma(alpha; a, b) + t (Jacobian of alpha = e^t)
    double prior = a * std::log(b) - std::lgamma(a) + a * t - b * alpha;
    // sum_v log N(w_v; 0, alpha^-1)
    prior += -0.5 * V * kLog2Pi + 0.5 * V * t - 0.5 * alpha * w_sq;

    double lik = 0.0;
    for (std::size_t r = 0; r < shard_.block.rows; ++r) {
        const auto x = shard_.block.x_row(r);
        const double z = -kernels::dot(w.data(), x.data(), x.size());
        const double y = shard_.block.y[r];
        lik += y * log_sigmoid(z) + (1.0 - y) * log_sigmoid(-z);
    }
    return prior_temper() * prior + lik;
}

std::vector<double> LogisticModel::grad(std::span<const double> theta) const {
    check_dim(theta);
    const int V = config_.V;
    const auto w = theta.first(static_cast<std::size_t>(V));
    const double t = theta[static_cast<std::size_t>(V)];
    const double alpha = std::exp(t);
    const double beta = prior_temper();

    std::vector<double> g(theta.size(), 0.0);
    for (int v = 0; v < V; ++v)
        g[static_cast<std::size_t>(v)] = -beta * alpha * w[static_cast<std::size_t>(v)];

    const double w_sq = kernels::dot(w.data(), w.data(), w.size());
    g[static_cast<std::size_t>(V)] =
        beta * (config_.prior_shape - config_.prior_rate * alpha + 0.5 * V -
                0.5 * alpha * w_sq);

    for (std::size_t r = 0; r < shard_.block.rows; ++r) {
        const auto x = shard_.block.x_row(r);
        const double z = -kernels::dot(w.data(), x.data(), x.size());
        const double resid = sigmoid(z) - shard_.block.y[r];
        kernels::axpy(resid, x.data(), g.data(), x.size());
    }
    return g;
}

double LogisticModel::hessian_trace(std::span<const double> theta) const {
    check_dim(theta);
    const int V = config_.V;
    const auto w = theta.first(static_cast<std::size_t>(V));
    const double alpha = std::exp(theta[static_cast<std::size_t>(V)]);
    const double beta = prior_temper();

    const double w_sq = kernels::dot(w.data(), w.data(), w.size());
    double tr = beta * (-V * alpha - config_.prior_rate * alpha - 0.5 * alpha * w_sq);
    for (std::size_t r = 0; r < shard_.block.rows; ++r) {
        const auto x = shard_.block.x_row(r);
        const double s = sigmoid(-kernels::dot(w.data(), x.data(), x.size()));
        tr -= s * (1.0 - s) * row_sqnorm_[r];
    }
    return tr;
}

double logistic_predictive_prob(std::span<const double> theta, std::span<const double> x) {
    // theta carries (w, t); only w enters the predictive
    return sigmoid(-kernels::dot(theta.data(), x.data(), x.size()));
}

double logistic_predictive_log_lik(std::span<const double> theta,
                                   std::span<const double> x, double y) {
    const double z = -kernels::dot(theta.data(), x.data(), x.size());
    return y * log_sigmoid(z) + (1.0 - y) * log_sigmoid(-z);
}

}  // namespace epvi::models
