#pragma once

#include <cstdint>
#include <utility>

#include "epvi/math.hpp"
#include "epvi/mixture.hpp"
#include "epvi/model.hpp"

namespace epvi {

// Free parameters of the K-component isotropic mixture: component means and
// log variances (sigma_k^2 = exp(log_sigma2_k), positive by construction).
struct VariationalParams {
    int dim = 0;
    int K = 0;
    std::vector<double> means;       // K x dim, row-major
    std::vector<double> log_sigma2;  // K

    std::span<const double> mean(int k) const {
        return {means.data() + static_cast<std::size_t>(k) * dim,
                static_cast<std::size_t>(dim)};
    }
    std::span<double> mean(int k) {
        return {means.data() + static_cast<std::size_t>(k) * dim,
                static_cast<std::size_t>(dim)};
    }
    double sigma2(int k) const { return std::exp(log_sigma2[static_cast<std::size_t>(k)]); }

    MixtureApprox to_mixture() const;
};

struct FitConfig {
    int K = 4;
    int max_iters = 5000;
    double rel_tol = 1e-6;      // relative objective change for convergence
    int convergence_window = 5;  // consecutive small-change iterations required
    double init_step = 0.25;
    double step_grow = 2.0;
    double max_step = 64.0;
    int max_halvings = 30;
    double init_mean_sd = 2.0;  // component means drawn N(0, init_mean_sd^2 I)
    int init_redraws = 20;
    bool record_trace = false;
};

struct FitReport {
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    double seconds = 0.0;
    int shard_id = -1;
    std::size_t rows = 0;
    std::vector<double> trace;  // accepted objective values, if requested
};

// Value decomposition of the surrogate bound:
//   value = (1/K) sum_k [log f(mu_k) + (sigma_k^2/2) tr H(mu_k)]  +  entropy,
//   entropy = -(1/K) sum_k log[(1/K) sum_j N_d(mu_k | mu_j, (sigma_k^2+sigma_j^2) I)].
// The split is exposed so tests can form the trace-truncated objective.
struct SurrogateTerms {
    double expected_log_joint = 0.0;  // (1/K) sum_k log f(mu_k)
    double curvature = 0.0;           // (1/K) sum_k (sigma_k^2/2) tr H(mu_k)
    double entropy = 0.0;

    double value() const { return expected_log_joint + curvature + entropy; }
};

struct SurrogateGrad {
    std::vector<double> means;       // K x dim
    std::vector<double> log_sigma2;  // K
};

// Thrown when the model returns a non-finite value at a component mean.
class NonFiniteModelError : public std::runtime_error {
  public:
    NonFiniteModelError(int component, const std::string& what)
        : std::runtime_error(what), component(component) {}
    int component;
};

SurrogateTerms surrogate_terms(const VariationalParams& params, const Model& model);
double surrogate_elbo(const VariationalParams& params, const Model& model);

// Analytic gradient. The mean-gradient omits the third-derivative terms that
// would arise from tr H(mu_k), so the mean block matches finite differences
// of the trace-truncated objective; the log_sigma2 block matches the full one.
SurrogateGrad surrogate_elbo_grad(const VariationalParams& params, const Model& model);

// Gradient ascent with backtracking line search; deterministic given rng.
std::pair<VariationalParams, FitReport> fit_params(const Model& model,
                                                   const FitConfig& config, Rng& rng);
std::pair<MixtureApprox, FitReport> fit(const Model& model, const FitConfig& config,
                                        Rng& rng);

}  // namespace epvi
