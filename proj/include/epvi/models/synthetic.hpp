#pragma once

#include <cstdint>

#include "epvi/model.hpp"
#include "epvi/models/gaussian_toy.hpp"
#include "epvi/models/logistic.hpp"
#include "epvi/models/tlsa.hpp"

namespace epvi::models {

// Generated dataset plus the parameters that produced it. `train`/`test`
// come from a seeded shuffle with the last `holdout` fraction held out.
struct SyntheticLogistic {
    Dataset train;
    Dataset test;
    double true_alpha = 0.0;
    std::vector<double> true_w;
};

struct SyntheticTlsa {
    Dataset train;
    Dataset test;
    std::vector<double> true_w;       // C x L
    std::vector<double> true_lambda;  // L
    std::vector<double> true_rbar;    // L x D
};

struct SyntheticGaussian {
    Dataset train;
    Dataset test;
    std::vector<double> true_theta;
};

// Covariates are drawn N(0,1); the responses follow the generative process.
SyntheticLogistic generate_logistic(const LogisticModelConfig& config, std::size_t N,
                                    double holdout, std::uint64_t seed);

SyntheticTlsa generate_tlsa(const TlsaModelConfig& config, std::size_t N, double holdout,
                            std::uint64_t seed);

// Observations x_i ~ N(theta, lik_var I) around a theta drawn from the prior.
SyntheticGaussian generate_gaussian(const GaussianToyConfig& config, std::size_t N,
                                    double holdout, std::uint64_t seed);

}  // namespace epvi::models
