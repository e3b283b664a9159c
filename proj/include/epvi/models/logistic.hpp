#pragma once

#include "epvi/model.hpp"

namespace epvi::models {

// Hierarchical Bayesian logistic regression:
//   alpha ~ Gamma(a, b),  w_v ~ N(0, alpha^-1),
//   y_n ~ Bernoulli(logit^-1(-w^T x_n)).
// theta = (w_1..w_V, t) with t = log alpha; the prior block carries the +t
// Jacobian of that reparameterization.
struct LogisticModelConfig {
    int V = 10;
    double prior_shape = 1.0;  // a
    double prior_rate = 1.0;   // b
};

class LogisticModel : public Model {
  public:
    LogisticModel(LogisticModelConfig config, DataShard shard, double prior_temper);

    double log_joint(std::span<const double> theta) const override;
    std::vector<double> grad(std::span<const double> theta) const override;
    double hessian_trace(std::span<const double> theta) const override;

    const LogisticModelConfig& config() const { return config_; }
    const DataShard& shard() const { return shard_; }

  private:
    LogisticModelConfig config_;
    DataShard shard_;
    std::vector<double> row_sqnorm_;  // ||x_n||^2, used by the Hessian trace
};

// log p(y | x, theta) for one test row
double logistic_predictive_log_lik(std::span<const double> theta,
                                   std::span<const double> x, double y);

// P(y = 1 | x, theta)
double logistic_predictive_prob(std::span<const double> theta, std::span<const double> x);

}  // namespace epvi::models
