#include "epvi/models/synthetic.hpp"

#include <cmath>
#include <numeric>

#include "epvi/kernels.hpp"
#include "epvi/math.hpp"

namespace epvi::models {

namespace {

// seeded shuffle, then split off the trailing holdout fraction
std::pair<Dataset, Dataset> split_holdout(const Dataset& all, double holdout, Rng& rng) {
    if (holdout < 0.0 || holdout >= 1.0)
        throw std::invalid_argument("holdout fraction must be in [0, 1)");
    std::vector<std::size_t> perm(all.rows);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = all.rows; i > 1; --i) {
        const std::size_t j = rng.bounded(i);
        std::swap(perm[i - 1], perm[j]);
    }
    const auto n_test = static_cast<std::size_t>(std::llround(holdout * static_cast<double>(all.rows)));
    const std::size_t n_train = all.rows - n_test;
    const std::span<const std::size_t> train_idx(perm.data(), n_train);
    const std::span<const std::size_t> test_idx(perm.data() + n_train, n_test);
    return {all.select(train_idx), all.select(test_idx)};
}

}  // namespace

SyntheticLogistic generate_logistic(const LogisticModelConfig& config, std::size_t N,
                                    double holdout, std::uint64_t seed) {
    if (N < 1) throw std::invalid_argument("generate_logistic: N must be >= 1");
    Rng rng(seed);
    SyntheticLogistic out;
    out.true_alpha = rng.gamma(config.prior_shape, config.prior_rate);
    const double w_sd = 1.0 / std::sqrt(out.true_alpha);
    out.true_w.resize(static_cast<std::size_t>(config.V));
    for (auto& w : out.true_w) w = rng.normal(0.0, w_sd);

    Dataset all;
    all.family = "logistic";
    all.rows = N;
    all.features = config.V;
    all.outputs = 1;
    all.x.resize(N * static_cast<std::size_t>(config.V));
    all.y.resize(N);
    for (std::size_t r = 0; r < N; ++r) {
        double* x = all.x.data() + r * static_cast<std::size_t>(config.V);
        for (int v = 0; v < config.V; ++v) x[static_cast<std::size_t>(v)] = rng.normal();
        const double p =
            sigmoid(-kernels::dot(out.true_w.data(), x, static_cast<std::size_t>(config.V)));
        all.y[r] = rng.uniform() < p ? 1.0 : 0.0;
    }
    std::tie(out.train, out.test) = split_holdout(all, holdout, rng);
    return out;
}

SyntheticTlsa generate_tlsa(const TlsaModelConfig& config, std::size_t N, double holdout,
                            std::uint64_t seed) {
    if (N < 1) throw std::invalid_argument("generate_tlsa: N must be >= 1");
    Rng rng(seed);
    SyntheticTlsa out;
    const int L = config.L;
    const int C = config.C;
    const int V = config.V;
    const int D = config.D;
    out.true_lambda.resize(static_cast<std::size_t>(L));
    out.true_rbar.resize(static_cast<std::size_t>(L) * D);
    out.true_w.resize(static_cast<std::size_t>(C) * L);
    for (int l = 0; l < L; ++l) {
        out.true_lambda[static_cast<std::size_t>(l)] = rng.exponential(config.rho);
        for (int d = 0; d < D; ++d)
            out.true_rbar[static_cast<std::size_t>(l) * D + d] = rng.uniform();
        for (int c = 0; c < C; ++c)
            out.true_w[static_cast<std::size_t>(c) * L + l] =
                rng.normal(0.0, std::sqrt(config.sigma_w2));
    }

    const auto grid = tlsa_grid(V, D);
    const double sign = config.paper_sign ? 1.0 : -1.0;
    std::vector<double> basis(static_cast<std::size_t>(L) * V);
    for (int l = 0; l < L; ++l) {
        const double coef = sign / out.true_lambda[static_cast<std::size_t>(l)];
        for (int v = 0; v < V; ++v) {
            const double sq = kernels::squared_distance(
                grid.data() + static_cast<std::size_t>(v) * D,
                out.true_rbar.data() + static_cast<std::size_t>(l) * D,
                static_cast<std::size_t>(D));
            basis[static_cast<std::size_t>(l) * V + v] = std::exp(coef * sq);
        }
    }

    Dataset all;
    all.family = "tlsa";
    all.rows = N;
    all.features = C;
    all.outputs = V;
    all.x.resize(N * static_cast<std::size_t>(C));
    all.y.resize(N * static_cast<std::size_t>(V));
    const double noise_sd = 1.0 / std::sqrt(config.tau);
    std::vector<double> a(static_cast<std::size_t>(L));
    for (std::size_t r = 0; r < N; ++r) {
        double* x = all.x.data() + r * static_cast<std::size_t>(C);
        for (int c = 0; c < C; ++c) x[static_cast<std::size_t>(c)] = rng.normal();
        std::fill(a.begin(), a.end(), 0.0);
        for (int c = 0; c < C; ++c)
            kernels::axpy(x[static_cast<std::size_t>(c)],
                          out.true_w.data() + static_cast<std::size_t>(c) * L, a.data(),
                          static_cast<std::size_t>(L));
        double* u = all.y.data() + r * static_cast<std::size_t>(V);
        std::fill(u, u + V, 0.0);
        for (int l = 0; l < L; ++l)
            kernels::axpy(a[static_cast<std::size_t>(l)],
                          basis.data() + static_cast<std::size_t>(l) * V, u,
                          static_cast<std::size_t>(V));
        for (int v = 0; v < V; ++v) u[static_cast<std::size_t>(v)] += rng.normal(0.0, noise_sd);
    }
    std::tie(out.train, out.test) = split_holdout(all, holdout, rng);
    return out;
}

SyntheticGaussian generate_gaussian(const GaussianToyConfig& config, std::size_t N,
                                    double holdout, std::uint64_t seed) {
    if (N < 1) throw std::invalid_argument("generate_gaussian: N must be >= 1");
    Rng rng(seed);
    SyntheticGaussian out;
    const auto d = config.prior_mean.size();
    out.true_theta.resize(d);
    const double prior_sd = std::sqrt(config.prior_var);
    for (std::size_t i = 0; i < d; ++i)
        out.true_theta[i] = rng.normal(config.prior_mean[i], prior_sd);

    Dataset all;
    all.family = "gaussian";
    all.rows = N;
    all.features = 0;
    all.outputs = static_cast<int>(d);
    all.y.resize(N * d);
    const double lik_sd = std::sqrt(config.lik_var);
    for (std::size_t r = 0; r < N; ++r)
        for (std::size_t i = 0; i < d; ++i)
            all.y[r * d + i] = rng.normal(out.true_theta[i], lik_sd);
    std::tie(out.train, out.test) = split_holdout(all, holdout, rng);
    return out;
}

}  // namespace epvi::models
