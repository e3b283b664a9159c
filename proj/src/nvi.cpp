#include "epvi/nvi.hpp"

#include <chrono>
#include <cmath>

#include "epvi/kernels.hpp"

namespace epvi {

namespace {

// per-component model evaluations feeding the Taylor part of the bound
struct ComponentEval {
    std::vector<double> log_f;      // K
    std::vector<double> trace;      // K
};

ComponentEval eval_components(const VariationalParams& p, const Model& model) {
    ComponentEval e;
    e.log_f.resize(static_cast<std::size_t>(p.K));
    e.trace.resize(static_cast<std::size_t>(p.K));
    for (int k = 0; k < p.K; ++k) {
        const double lf = model.log_joint(p.mean(k));
        const double tr = model.hessian_trace(p.mean(k));
        if (!std::isfinite(lf) || !std::isfinite(tr))
            throw NonFiniteModelError(
                k, "surrogate_elbo: non-finite model evaluation at component " +
                       std::to_string(k));
        e.log_f[static_cast<std::size_t>(k)] = lf;
        e.trace[static_cast<std::size_t>(k)] = tr;
    }
    return e;
}

// pairwise-convolution matrix: log N_d(mu_k | mu_j, (sigma_k^2+sigma_j^2) I)
std::vector<double> pairwise_log_normals(const VariationalParams& p) {
    const auto K = static_cast<std::size_t>(p.K);
    std::vector<double> ln(K * K);
    for (int k = 0; k < p.K; ++k) {
        for (int j = 0; j < p.K; ++j) {
            const double v = p.sigma2(k) + p.sigma2(j);
            ln[static_cast<std::size_t>(k) * K + static_cast<std::size_t>(j)] =
                log_normal_iso(p.mean(k), p.mean(j), v);
        }
    }
    return ln;
}

double entropy_bound(const VariationalParams& p, const std::vector<double>& ln,
                     std::vector<double>* log_g_out = nullptr) {
    const auto K = static_cast<std::size_t>(p.K);
    const double log_k = std::log(static_cast<double>(p.K));
    double h = 0.0;
    if (log_g_out) log_g_out->resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        const double lg = log_sum_exp({ln.data() + k * K, K}) - log_k;
        if (log_g_out) (*log_g_out)[k] = lg;
        h -= lg;
    }
    return h / static_cast<double>(p.K);
}

}  // namespace

MixtureApprox VariationalParams::to_mixture() const {
    std::vector<GaussianComponent> comps(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        const auto m = mean(k);
        comps[static_cast<std::size_t>(k)] =
            GaussianComponent{{m.begin(), m.end()}, sigma2(k)};
    }
    return MixtureApprox(dim, std::move(comps));
}

SurrogateTerms surrogate_terms(const VariationalParams& p, const Model& model) {
    if (p.dim != model.dim())
        throw std::invalid_argument("surrogate_terms: params/model dimension mismatch");
    const ComponentEval e = eval_components(p, model);
    SurrogateTerms t;
    for (int k = 0; k < p.K; ++k) {
        t.expected_log_joint += e.log_f[static_cast<std::size_t>(k)];
        t.curvature += 0.5 * p.sigma2(k) * e.trace[static_cast<std::size_t>(k)];
    }
    t.expected_log_joint /= p.K;
    t.curvature /= p.K;
    t.entropy = entropy_bound(p, pairwise_log_normals(p));
    return t;
}

double surrogate_elbo(const VariationalParams& p, const Model& model) {
    return surrogate_terms(p, model).value();
}

SurrogateGrad surrogate_elbo_grad(const VariationalParams& p, const Model& model) {
    if (p.dim != model.dim())
        throw std::invalid_argument("surrogate_elbo_grad: params/model dimension mismatch");
    const auto K = static_cast<std::size_t>(p.K);
    const auto d = static_cast<std::size_t>(p.dim);
    const double inv_k = 1.0 / static_cast<double>(p.K);

    SurrogateGrad g;
    g.means.assign(K * d, 0.0);
    g.log_sigma2.assign(K, 0.0);

    // Taylor part: (1/K) grad log f(mu_k) for the means (trace term omitted
    // by convention); (sigma_k^2/2) tr H(mu_k) for the log-variances.
    for (int k = 0; k < p.K; ++k) {
        const auto gk = model.grad(p.mean(k));
        const double tr = model.hessian_trace(p.mean(k));
        if (!std::isfinite(tr))
            throw NonFiniteModelError(k, "surrogate_elbo_grad: non-finite trace at component " +
                                             std::to_string(k));
        for (const double v : gk)
            if (!std::isfinite(v))
                throw NonFiniteModelError(
                    k, "surrogate_elbo_grad: non-finite gradient at component " +
                           std::to_string(k));
        kernels::axpy(inv_k, gk.data(), g.means.data() + static_cast<std::size_t>(k) * d, d);
        g.log_sigma2[static_cast<std::size_t>(k)] += inv_k * 0.5 * p.sigma2(k) * tr;
    }

    // Entropy part. With rho_kj = N_kj / (K g_k) (rows sum to 1):
    //   dH/dmu_i     = -(1/K) [ sum_j rho_ij (mu_j-mu_i)/v_ij
    //                          + sum_k rho_ki (mu_k-mu_i)/v_ki ]
    //   dH/dsigma_i2 = -(1/K) [ sum_j rho_ij phi_ij + sum_k rho_ki phi_ki ],
    //   phi_kj = (dist_kj / v_kj - d) / (2 v_kj).
    const auto ln = pairwise_log_normals(p);
    std::vector<double> log_g;
    entropy_bound(p, ln, &log_g);
    const double log_k = std::log(static_cast<double>(p.K));

    for (int i = 0; i < p.K; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        double dh_dsigma2 = 0.0;
        double* mean_grad = g.means.data() + ii * d;
        for (int j = 0; j < p.K; ++j) {
            const auto jj = static_cast<std::size_t>(j);
            const double v_ij = p.sigma2(i) + p.sigma2(j);
            const double dist =
                kernels::squared_distance(p.mean(i).data(), p.mean(j).data(), d);
            const double phi = (dist / v_ij - static_cast<double>(p.dim)) / (2.0 * v_ij);
            const double rho_ij = std::exp(ln[ii * K + jj] - log_k - log_g[ii]);
            const double rho_ji = std::exp(ln[jj * K + ii] - log_k - log_g[jj]);

            const double mean_coef = -inv_k * (rho_ij + rho_ji) / v_ij;
            for (std::size_t t = 0; t < d; ++t)
                mean_grad[t] += mean_coef * (p.mean(j)[t] - p.mean(i)[t]);
            dh_dsigma2 += -inv_k * (rho_ij + rho_ji) * phi;
        }
        g.log_sigma2[ii] += dh_dsigma2 * p.sigma2(i);
    }
    return g;
}

namespace {

struct TermsOrNan {
    SurrogateTerms terms;
    bool ok = false;

    double full() const { return ok ? terms.value() : std::numeric_limits<double>::quiet_NaN(); }
    // objective the mean block ascends: curvature term omitted, matching the
    // gradient's truncation convention
    double truncated() const {
        return ok ? terms.expected_log_joint + terms.entropy
                  : std::numeric_limits<double>::quiet_NaN();
    }
};

TermsOrNan try_terms(const VariationalParams& p, const Model& model) {
    TermsOrNan t;
    try {
        t.terms = surrogate_terms(p, model);
        t.ok = std::isfinite(t.terms.value()) && std::isfinite(t.terms.expected_log_joint);
    } catch (const NonFiniteModelError&) {
        t.ok = false;
    }
    return t;
}

}  // namespace

// Alternating block ascent. The log-variance block follows its exact
// gradient and line-searches the full surrogate. The mean block follows the
// truncated gradient and line-searches the trace-truncated surrogate: the
// truncated direction need not be an ascent direction of the full bound
// (wherever tr H > 0 the full bound is not even bounded in sigma^2), so a
// single joint line search stalls on multimodal targets.
std::pair<VariationalParams, FitReport> fit_params(const Model& model,
                                                   const FitConfig& config, Rng& rng) {
    if (config.K < 1) throw std::invalid_argument("fit: K must be >= 1");
    if (!(config.rel_tol > 0.0)) throw std::invalid_argument("fit: rel_tol must be > 0");
    const auto start = std::chrono::steady_clock::now();
    const auto d = static_cast<std::size_t>(model.dim());

    VariationalParams p;
    p.dim = model.dim();
    p.K = config.K;
    p.means.resize(static_cast<std::size_t>(config.K) * d);
    p.log_sigma2.assign(static_cast<std::size_t>(config.K), 0.0);

    TermsOrNan cur;
    for (int attempt = 0; attempt <= config.init_redraws; ++attempt) {
        for (auto& m : p.means) m = rng.normal(0.0, config.init_mean_sd);
        cur = try_terms(p, model);
        if (cur.ok) break;
    }
    if (!cur.ok)
        throw std::runtime_error("fit: initialization failure, objective non-finite after " +
                                 std::to_string(config.init_redraws) + " re-draws");

    FitReport report;
    if (config.record_trace) report.trace.push_back(cur.full());

    double sigma_step = config.init_step;
    double mean_step = config.init_step;
    int small_change_streak = 0;
    VariationalParams cand = p;

    int iter = 0;
    for (; iter < config.max_iters; ++iter) {
        const double before = cur.full();
        bool any_accepted = false;

        // log-variance block
        {
            const SurrogateGrad grad = surrogate_elbo_grad(p, model);
            double s = sigma_step;
            for (int h = 0; h <= config.max_halvings; ++h, s *= 0.5) {
                cand.means = p.means;
                for (std::size_t i = 0; i < p.log_sigma2.size(); ++i)
                    cand.log_sigma2[i] = p.log_sigma2[i] + s * grad.log_sigma2[i];
                const TermsOrNan next = try_terms(cand, model);
                if (next.ok && next.full() > cur.full()) {
                    std::swap(p, cand);
                    cur = next;
                    sigma_step = std::min(s * config.step_grow, config.max_step);
                    any_accepted = true;
                    break;
                }
            }
        }

        // mean block
        {
            const SurrogateGrad grad = surrogate_elbo_grad(p, model);
            double s = mean_step;
            for (int h = 0; h <= config.max_halvings; ++h, s *= 0.5) {
                cand.log_sigma2 = p.log_sigma2;
                for (std::size_t i = 0; i < p.means.size(); ++i)
                    cand.means[i] = p.means[i] + s * grad.means[i];
                const TermsOrNan next = try_terms(cand, model);
                if (next.ok && next.truncated() > cur.truncated()) {
                    std::swap(p, cand);
                    cur = next;
                    mean_step = std::min(s * config.step_grow, config.max_step);
                    any_accepted = true;
                    break;
                }
            }
        }

        const double after = cur.full();
        if (config.record_trace) report.trace.push_back(after);

        if (!any_accepted) {
            // neither block can improve at the smallest step: stationary
            report.converged = true;
            ++iter;
            break;
        }

        const double change = std::abs(after - before) / (std::abs(before) + 1e-8);
        if (change < config.rel_tol) {
            if (++small_change_streak >= config.convergence_window) {
                report.converged = true;
                ++iter;
                break;
            }
        } else {
            small_change_streak = 0;
        }
    }

    report.objective = cur.full();
    report.iterations = iter;
    report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {std::move(p), std::move(report)};
}

std::pair<MixtureApprox, FitReport> fit(const Model& model, const FitConfig& config,
                                        Rng& rng) {
    auto [params, report] = fit_params(model, config, rng);
    return {params.to_mixture(), std::move(report)};
}

}  // namespace epvi
