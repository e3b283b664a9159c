#pragma once

#include <memory>

#include "epvi/model.hpp"

namespace epvi::models {

// Conjugate toy: N(m0, s0^2 I) prior on theta, N(x_i; theta, s^2 I)
// likelihood. Both the tempered subposterior and the full-data posterior are
// isotropic Gaussians, available in closed form for end-to-end checks.
struct GaussianToyConfig {
    std::vector<double> prior_mean;  // m0, length d
    double prior_var = 1.0;          // s0^2
    double lik_var = 1.0;            // s^2
};

struct IsotropicGaussian {
    std::vector<double> mean;
    double variance = 1.0;
};

class GaussianToyModel : public Model {
  public:
    GaussianToyModel(GaussianToyConfig config, DataShard shard, double prior_temper);

    double log_joint(std::span<const double> theta) const override;
    std::vector<double> grad(std::span<const double> theta) const override;
    double hessian_trace(std::span<const double> theta) const override;

    // closed-form tempered subposterior for this shard
    IsotropicGaussian analytic_subposterior() const;

    const GaussianToyConfig& config() const { return config_; }
    const DataShard& shard() const { return shard_; }

  private:
    GaussianToyConfig config_;
    DataShard shard_;
    std::vector<double> sum_x_;  // per-dim sum of observations
};

// closed-form posterior given all rows of `data` with an untempered prior
IsotropicGaussian gaussian_toy_full_posterior(const GaussianToyConfig& config,
                                              const Dataset& data);

}  // namespace epvi::models
