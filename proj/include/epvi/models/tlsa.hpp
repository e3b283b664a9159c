#pragma once

#include "epvi/model.hpp"

namespace epvi::models {

// Topographic latent source analysis: observations U (N x V) are a
// covariate-weighted superposition of L spatial sources,
//   u_nv ~ N(sum_c x_nc sum_l w_cl g_lv, tau^-1),
//   g_lv = exp(sign * lambda_l^-1 ||r_v - rbar_l||^2),
// with lambda_l ~ Exponential(rho), rbar_ld ~ Beta(1,1), w_cl ~ N(0, sigma_w^2).
// The default basis sign is negative (a decaying radial basis); paper_sign
// flips it to the positive exponent.
//
// theta packs (W row-major C x L, t_l = log lambda_l, s_ld = logit(rbar_ld)),
// so dim = C*L + L + L*D. Prior terms carry the log/logit Jacobians.
struct TlsaModelConfig {
    int L = 4;              // latent sources
    int C = 3;              // covariates
    int V = 50;             // output dimensions
    int D = 1;              // spatial dimensions
    double rho = 1.0;       // Exponential rate on lambda
    double sigma_w2 = 5.0;  // weight prior variance
    double tau = 1.0;       // observation precision
    bool paper_sign = false;

    int theta_dim() const { return C * L + L + L * D; }
};

// fixed output locations r_v: a uniform lattice on [0,1]^D
std::vector<double> tlsa_grid(int V, int D);  // V x D row-major

class TlsaModel : public Model {
  public:
    TlsaModel(TlsaModelConfig config, DataShard shard, double prior_temper);

    double log_joint(std::span<const double> theta) const override;
    std::vector<double> grad(std::span<const double> theta) const override;
    double hessian_trace(std::span<const double> theta) const override;

    const TlsaModelConfig& config() const { return config_; }

    // basis matrix G (L x V row-major) for the given theta
    std::vector<double> basis(std::span<const double> theta) const;

  private:
    struct Eval;  // shared forward pass
    void forward(std::span<const double> theta, Eval& e) const;

    TlsaModelConfig config_;
    DataShard shard_;
    std::vector<double> grid_;      // V x D
    std::vector<double> colsq_x_;   // per-covariate sum of squares
};

// log p(u_row | x_row, theta) for one held-out row (joint over the V outputs)
double tlsa_predictive_log_lik(const TlsaModelConfig& config,
                               std::span<const double> grid,
                               std::span<const double> theta,
                               std::span<const double> x_row,
                               std::span<const double> u_row);

}  // namespace epvi::models
