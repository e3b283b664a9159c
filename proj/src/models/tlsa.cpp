#include "epvi/models/tlsa.hpp"

#include <cmath>

#include "epvi/kernels.hpp"
#include "epvi/math.hpp"

namespace epvi::models {

namespace {

// packing offsets inside theta
struct Layout {
    int C, L, D;
    int w_off() const { return 0; }                 // C*L entries, row-major by c
    int t_off() const { return C * L; }             // L entries
    int s_off() const { return C * L + L; }         // L*D entries, row-major by l
};

}  // namespace

std::vector<double> tlsa_grid(int V, int D) {
    if (V < 1 || D < 1) throw std::invalid_argument("tlsa_grid: V and D must be >= 1");
    std::vector<double> grid(static_cast<std::size_t>(V) * D);
    if (D == 1) {
        for (int v = 0; v < V; ++v)
            grid[static_cast<std::size_t>(v)] = V == 1 ? 0.5 : static_cast<double>(v) / (V - 1);
        return grid;
    }
    int nside = 1;
    while (std::pow(nside, D) < V) ++nside;
    for (int v = 0; v < V; ++v) {
        int rem = v;
        for (int d = 0; d < D; ++d) {
            const int digit = rem % nside;
            rem /= nside;
            grid[static_cast<std::size_t>(v) * D + d] =
                nside == 1 ? 0.5 : static_cast<double>(digit) / (nside - 1);
        }
    }
    return grid;
}

TlsaModel::TlsaModel(TlsaModelConfig config, DataShard shard, double prior_temper)
    : Model(config.theta_dim(), prior_temper), config_(config), shard_(std::move(shard)) {
    if (config_.L < 1 || config_.C < 1 || config_.V < 1 || config_.D < 1)
        throw std::invalid_argument("TlsaModel: L, C, V, D must be >= 1");
    if (!(config_.rho > 0.0) || !(config_.sigma_w2 > 0.0) || !(config_.tau > 0.0))
        throw std::invalid_argument("TlsaModel: hyperparameters must be positive");
    if (shard_.block.features != config_.C || shard_.block.outputs != config_.V)
        throw std::invalid_argument("TlsaModel: shard rows must have C covariates and V outputs");
    grid_ = tlsa_grid(config_.V, config_.D);
    colsq_x_.assign(static_cast<std::size_t>(config_.C), 0.0);
    for (std::size_t r = 0; r < shard_.block.rows; ++r) {
        const auto x = shard_.block.x_row(r);
        for (int c = 0; c < config_.C; ++c)
            colsq_x_[static_cast<std::size_t>(c)] += x[static_cast<std::size_t>(c)] * x[static_cast<std::size_t>(c)];
    }
}

// Forward pass shared by value/grad/trace: basis, linear predictor, residuals.
struct TlsaModel::Eval {
    std::vector<double> rbar;   // L x D
    std::vector<double> coef;   // c_l = sign * exp(-t_l)
    std::vector<double> dist;   // L x V squared distances
    std::vector<double> g;      // L x V basis
    std::vector<double> a;      // n x L (X W)
    std::vector<double> err;    // n x V (U - A G)
};

void TlsaModel::forward(std::span<const double> theta, Eval& e) const {
    const Layout lay{config_.C, config_.L, config_.D};
    const int L = config_.L;
    const int V = config_.V;
    const int C = config_.C;
    const int D = config_.D;
    const std::size_t n = shard_.block.rows;
    const double sign = config_.paper_sign ? 1.0 : -1.0;

    e.rbar.resize(static_cast<std::size_t>(L) * D);
    e.coef.resize(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l) {
        e.coef[static_cast<std::size_t>(l)] =
            sign * std::exp(-theta[static_cast<std::size_t>(lay.t_off() + l)]);
        for (int d = 0; d < D; ++d)
            e.rbar[static_cast<std::size_t>(l) * D + d] =
                sigmoid(theta[static_cast<std::size_t>(lay.s_off() + l * D + d)]);
    }

    e.dist.resize(static_cast<std::size_t>(L) * V);
    e.g.resize(static_cast<std::size_t>(L) * V);
    for (int l = 0; l < L; ++l) {
        const double* rb = e.rbar.data() + static_cast<std::size_t>(l) * D;
        for (int v = 0; v < V; ++v) {
            const double sq = kernels::squared_distance(
                grid_.data() + static_cast<std::size_t>(v) * D, rb, static_cast<std::size_t>(D));
            e.dist[static_cast<std::size_t>(l) * V + v] = sq;
            e.g[static_cast<std::size_t>(l) * V + v] =
                std::exp(e.coef[static_cast<std::size_t>(l)] * sq);
        }
    }

    const double* w = theta.data() + lay.w_off();
    e.a.assign(n * static_cast<std::size_t>(L), 0.0);
    e.err.resize(n * static_cast<std::size_t>(V));
    for (std::size_t r = 0; r < n; ++r) {
        const auto x = shard_.block.x_row(r);
        double* a_row = e.a.data() + r * static_cast<std::size_t>(L);
        for (int c = 0; c < C; ++c)
            kernels::axpy(x[static_cast<std::size_t>(c)], w + static_cast<std::size_t>(c) * L,
                          a_row, static_cast<std::size_t>(L));
        double* err_row = e.err.data() + r * static_cast<std::size_t>(V);
        const auto u = shard_.block.y_row(r);
        for (int v = 0; v < V; ++v) err_row[static_cast<std::size_t>(v)] = u[static_cast<std::size_t>(v)];
        for (int l = 0; l < L; ++l)
            kernels::axpy(-a_row[static_cast<std::size_t>(l)],
                          e.g.data() + static_cast<std::size_t>(l) * V, err_row,
                          static_cast<std::size_t>(V));
    }
}

double TlsaModel::log_joint(std::span<const double> theta) const {
    check_dim(theta);
    const Layout lay{config_.C, config_.L, config_.D};
    const int L = config_.L;
    const int V = config_.V;
    const int C = config_.C;
    const int D = config_.D;
    const std::size_t n = shard_.block.rows;

    Eval e;
    forward(theta, e);

    const double* w = theta.data() + lay.w_off();
    const double w_sq = kernels::dot(w, w, static_cast<std::size_t>(C) * L);
    double prior = -0.5 * C * L * (kLog2Pi + std::log(config_.sigma_w2)) -
                   0.5 * w_sq / config_.sigma_w2;
    for (int l = 0; l < L; ++l) {
        const double t = theta[static_cast<std::size_t>(lay.t_off() + l)];
        prior += std::log(config_.rho) - config_.rho * std::exp(t) + t;
    }
    for (int i = 0; i < L * D; ++i) {
        const double s = theta[static_cast<std::size_t>(lay.s_off() + i)];
        prior += log_sigmoid(s) + log_sigmoid(-s);  // Beta(1,1) Jacobian through logit
    }

    double sse = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        const double* err_row = e.err.data() + r * static_cast<std::size_t>(V);
        sse += kernels::dot(err_row, err_row, static_cast<std::size_t>(V));
    }
    const double lik = 0.5 * static_cast<double>(n) * V * (std::log(config_.tau) - kLog2Pi) -
                       0.5 * config_.tau * sse;
    return prior_temper() * prior + lik;
}

std::vector<double> TlsaModel::grad(std::span<const double> theta) const {
    check_dim(theta);
    const Layout lay{config_.C, config_.L, config_.D};
    const int L = config_.L;
    const int V = config_.V;
    const int C = config_.C;
    const int D = config_.D;
    const std::size_t n = shard_.block.rows;
    const double beta = prior_temper();
    const double tau = config_.tau;

    Eval e;
    forward(theta, e);

    std::vector<double> g(theta.size(), 0.0);

    // prior block
    const double* w = theta.data() + lay.w_off();
    for (int i = 0; i < C * L; ++i)
        g[static_cast<std::size_t>(i)] = -beta * w[static_cast<std::size_t>(i)] / config_.sigma_w2;
    for (int l = 0; l < L; ++l) {
        const double t = theta[static_cast<std::size_t>(lay.t_off() + l)];
        g[static_cast<std::size_t>(lay.t_off() + l)] = beta * (1.0 - config_.rho * std::exp(t));
    }
    for (int i = 0; i < L * D; ++i) {
        const double s = theta[static_cast<std::size_t>(lay.s_off() + i)];
        g[static_cast<std::size_t>(lay.s_off() + i)] = beta * (1.0 - 2.0 * sigmoid(s));
    }

    // likelihood block; E = U - A G
    // dW = tau X^T (E G^T), accumulated per row via egt_nl = <err_n, g_l>
    std::vector<double> egt(static_cast<std::size_t>(L));
    std::vector<double> ate(static_cast<std::size_t>(L) * V, 0.0);  // A^T E
    for (std::size_t r = 0; r < n; ++r) {
        const double* err_row = e.err.data() + r * static_cast<std::size_t>(V);
        const double* a_row = e.a.data() + r * static_cast<std::size_t>(L);
        const auto x = shard_.block.x_row(r);
        for (int l = 0; l < L; ++l) {
            egt[static_cast<std::size_t>(l)] = kernels::dot(
                err_row, e.g.data() + static_cast<std::size_t>(l) * V, static_cast<std::size_t>(V));
            kernels::axpy(a_row[static_cast<std::size_t>(l)], err_row,
                          ate.data() + static_cast<std::size_t>(l) * V, static_cast<std::size_t>(V));
        }
        for (int c = 0; c < C; ++c)
            kernels::axpy(tau * x[static_cast<std::size_t>(c)], egt.data(),
                          g.data() + static_cast<std::size_t>(c) * L, static_cast<std::size_t>(L));
    }

    // dt_l and ds_ld through the basis
    for (int l = 0; l < L; ++l) {
        const double c_l = e.coef[static_cast<std::size_t>(l)];
        const double* g_row = e.g.data() + static_cast<std::size_t>(l) * V;
        const double* d_row = e.dist.data() + static_cast<std::size_t>(l) * V;
        const double* ate_row = ate.data() + static_cast<std::size_t>(l) * V;
        double acc_t = 0.0;
        for (int v = 0; v < V; ++v) {
            // dg/dt = g * dist * (-c)
            acc_t += ate_row[static_cast<std::size_t>(v)] * g_row[static_cast<std::size_t>(v)] *
                     d_row[static_cast<std::size_t>(v)] * (-c_l);
        }
        g[static_cast<std::size_t>(lay.t_off() + l)] += tau * acc_t;

        for (int d = 0; d < D; ++d) {
            const double rb = e.rbar[static_cast<std::size_t>(l) * D + d];
            const double dr_ds = rb * (1.0 - rb);
            double acc_s = 0.0;
            for (int v = 0; v < V; ++v) {
                const double delta = grid_[static_cast<std::size_t>(v) * D + d] - rb;
                // dg/drbar = -2 c g (r_v - rbar)
                acc_s += ate_row[static_cast<std::size_t>(v)] *
                         (-2.0 * c_l * g_row[static_cast<std::size_t>(v)] * delta) * dr_ds;
            }
            g[static_cast<std::size_t>(lay.s_off() + l * D + d)] += tau * acc_s;
        }
    }
    return g;
}

double TlsaModel::hessian_trace(std::span<const double> theta) const {
    check_dim(theta);
    const Layout lay{config_.C, config_.L, config_.D};
    const int L = config_.L;
    const int V = config_.V;
    const int C = config_.C;
    const int D = config_.D;
    const std::size_t n = shard_.block.rows;
    const double beta = prior_temper();
    const double tau = config_.tau;

    Eval e;
    forward(theta, e);

    // prior curvature
    double tr = -beta * C * L / config_.sigma_w2;
    for (int l = 0; l < L; ++l)
        tr += -beta * config_.rho * std::exp(theta[static_cast<std::size_t>(lay.t_off() + l)]);
    for (int i = 0; i < L * D; ++i) {
        const double s = theta[static_cast<std::size_t>(lay.s_off() + i)];
        const double sb = sigmoid(s);
        tr += -beta * 2.0 * sb * (1.0 - sb);
    }

    // A^T E and per-source sum_n A_nl^2
    std::vector<double> ate(static_cast<std::size_t>(L) * V, 0.0);
    std::vector<double> colsq_a(static_cast<std::size_t>(L), 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const double* err_row = e.err.data() + r * static_cast<std::size_t>(V);
        const double* a_row = e.a.data() + r * static_cast<std::size_t>(L);
        for (int l = 0; l < L; ++l) {
            const double a = a_row[static_cast<std::size_t>(l)];
            colsq_a[static_cast<std::size_t>(l)] += a * a;
            kernels::axpy(a, err_row, ate.data() + static_cast<std::size_t>(l) * V,
                          static_cast<std::size_t>(V));
        }
    }

    // W block: d2/dw_cl2 = -tau (sum_n x_nc^2)(sum_v g_lv^2)
    for (int l = 0; l < L; ++l) {
        const double* g_row = e.g.data() + static_cast<std::size_t>(l) * V;
        const double g_sq = kernels::dot(g_row, g_row, static_cast<std::size_t>(V));
        for (int c = 0; c < C; ++c) tr -= tau * colsq_x_[static_cast<std::size_t>(c)] * g_sq;
    }

    // t and s blocks
    for (int l = 0; l < L; ++l) {
        const double c_l = e.coef[static_cast<std::size_t>(l)];
        const double* g_row = e.g.data() + static_cast<std::size_t>(l) * V;
        const double* d_row = e.dist.data() + static_cast<std::size_t>(l) * V;
        const double* ate_row = ate.data() + static_cast<std::size_t>(l) * V;
        const double asq = colsq_a[static_cast<std::size_t>(l)];

        double acc = 0.0;
        for (int v = 0; v < V; ++v) {
            const double gv = g_row[static_cast<std::size_t>(v)];
            const double dv = d_row[static_cast<std::size_t>(v)];
            const double dg_dt = gv * dv * (-c_l);
            const double d2g_dt2 = gv * (c_l * dv * c_l * dv + c_l * dv);
            acc += -asq * dg_dt * dg_dt + ate_row[static_cast<std::size_t>(v)] * d2g_dt2;
        }
        tr += tau * acc;

        for (int d = 0; d < D; ++d) {
            const double rb = e.rbar[static_cast<std::size_t>(l) * D + d];
            const double r1 = rb * (1.0 - rb);            // drbar/ds
            const double r2 = r1 * (1.0 - 2.0 * rb);      // d2rbar/ds2
            double acc_s = 0.0;
            for (int v = 0; v < V; ++v) {
                const double gv = g_row[static_cast<std::size_t>(v)];
                const double delta = grid_[static_cast<std::size_t>(v) * D + d] - rb;
                const double dg_dr = -2.0 * c_l * gv * delta;
                const double d2g_dr2 = 2.0 * c_l * gv * (2.0 * c_l * delta * delta + 1.0);
                const double dg_ds = dg_dr * r1;
                const double d2g_ds2 = d2g_dr2 * r1 * r1 + dg_dr * r2;
                acc_s += -asq * dg_ds * dg_ds + ate_row[static_cast<std::size_t>(v)] * d2g_ds2;
            }
            tr += tau * acc_s;
        }
    }
    return tr;
}

std::vector<double> TlsaModel::basis(std::span<const double> theta) const {
    check_dim(theta);
    Eval e;
    forward(theta, e);
    return e.g;
}

double tlsa_predictive_log_lik(const TlsaModelConfig& config,
                               std::span<const double> grid,
                               std::span<const double> theta,
                               std::span<const double> x_row,
                               std::span<const double> u_row) {
    const Layout lay{config.C, config.L, config.D};
    const int L = config.L;
    const int V = config.V;
    const int D = config.D;
    const double sign = config.paper_sign ? 1.0 : -1.0;

    std::vector<double> a(static_cast<std::size_t>(L), 0.0);
    for (int c = 0; c < config.C; ++c)
        kernels::axpy(x_row[static_cast<std::size_t>(c)],
                      theta.data() + static_cast<std::size_t>(c) * L, a.data(),
                      static_cast<std::size_t>(L));

    double ll = 0.5 * V * (std::log(config.tau) - kLog2Pi);
    std::vector<double> rbar(static_cast<std::size_t>(D));
    std::vector<double> mean(static_cast<std::size_t>(V), 0.0);
    for (int l = 0; l < L; ++l) {
        const double coef = sign * std::exp(-theta[static_cast<std::size_t>(lay.t_off() + l)]);
        for (int d = 0; d < D; ++d)
            rbar[static_cast<std::size_t>(d)] =
                sigmoid(theta[static_cast<std::size_t>(lay.s_off() + l * D + d)]);
        for (int v = 0; v < V; ++v) {
            const double sq = kernels::squared_distance(
                grid.data() + static_cast<std::size_t>(v) * D, rbar.data(),
                static_cast<std::size_t>(D));
            mean[static_cast<std::size_t>(v)] +=
                a[static_cast<std::size_t>(l)] * std::exp(coef * sq);
        }
    }
    const double sse = kernels::squared_distance(u_row.data(), mean.data(),
                                                 static_cast<std::size_t>(V));
    return ll - 0.5 * config.tau * sse;
}

}  // namespace epvi::models
