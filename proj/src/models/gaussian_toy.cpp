#include "epvi/models/gaussian_toy.hpp"

#include <cmath>

#include "epvi/kernels.hpp"
#include "epvi/math.hpp"

namespace epvi::models {

GaussianToyModel::GaussianToyModel(GaussianToyConfig config, DataShard shard,
                                   double prior_temper)
    : Model(static_cast<int>(config.prior_mean.size()), prior_temper),
      config_(std::move(config)),
      shard_(std::move(shard)) {
    if (!(config_.prior_var > 0.0) || !(config_.lik_var > 0.0))
        throw std::invalid_argument("GaussianToyModel: variances must be positive");
    if (shard_.block.rows > 0 && shard_.block.outputs != dim())
        throw std::invalid_argument("GaussianToyModel: data dimension mismatch");
    sum_x_.assign(static_cast<std::size_t>(dim()), 0.0);
    for (std::size_t r = 0; r < shard_.block.rows; ++r)
        kernels::axpy(1.0, shard_.block.y_row(r).data(), sum_x_.data(),
                      static_cast<std::size_t>(dim()));
}

double GaussianToyModel::log_joint(std::span<const double> theta) const {
    check_dim(theta);
    const double beta = prior_temper();
    double lp = beta * log_normal_iso(theta, config_.prior_mean, config_.prior_var);
    for (std::size_t r = 0; r < shard_.block.rows; ++r)
        lp += log_normal_iso(shard_.block.y_row(r), theta, config_.lik_var);
    return lp;
}

std::vector<double> GaussianToyModel::grad(std::span<const double> theta) const {
    check_dim(theta);
    const double beta = prior_temper();
    const double n = static_cast<double>(shard_.block.rows);
    std::vector<double> g(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        g[i] = beta * (config_.prior_mean[i] - theta[i]) / config_.prior_var +
               (sum_x_[i] - n * theta[i]) / config_.lik_var;
    }
    return g;
}

double GaussianToyModel::hessian_trace(std::span<const double> theta) const {
    check_dim(theta);
    const double d = static_cast<double>(dim());
    const double n = static_cast<double>(shard_.block.rows);
    return -d * (prior_temper() / config_.prior_var + n / config_.lik_var);
}

IsotropicGaussian GaussianToyModel::analytic_subposterior() const {
    const double beta = prior_temper();
    const double n = static_cast<double>(shard_.block.rows);
    const double precision = beta / config_.prior_var + n / config_.lik_var;
    IsotropicGaussian out;
    out.variance = 1.0 / precision;
    out.mean.resize(static_cast<std::size_t>(dim()));
    for (std::size_t i = 0; i < out.mean.size(); ++i) {
        out.mean[i] = out.variance * (beta * config_.prior_mean[i] / config_.prior_var +
                                      sum_x_[i] / config_.lik_var);
    }
    return out;
}

IsotropicGaussian gaussian_toy_full_posterior(const GaussianToyConfig& config,
                                              const Dataset& data) {
    DataShard all{0, data};
    GaussianToyModel m(config, std::move(all), 1.0);
    return m.analytic_subposterior();
}

}  // namespace epvi::models
