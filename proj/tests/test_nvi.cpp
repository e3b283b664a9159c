#include <doctest.h>

#include <cmath>
#include <cstring>

#include "epvi/models/gaussian_toy.hpp"
#include "epvi/models/logistic.hpp"
#include "epvi/models/synthetic.hpp"
#include "epvi/nvi.hpp"
#include "test_util.hpp"

using namespace epvi;
using namespace epvi::models;
using namespace epvi::testutil;

namespace {

// standard-normal log-density target via a dataless conjugate toy
GaussianToyModel standard_normal_model(int dim) {
    Dataset empty;
    empty.family = "gaussian";
    empty.rows = 0;
    empty.outputs = dim;
    return GaussianToyModel(GaussianToyConfig{std::vector<double>(static_cast<std::size_t>(dim), 0.0), 1.0, 1.0},
                            DataShard{0, std::move(empty)}, 1.0);
}

VariationalParams random_params(Rng& rng, int dim, int k) {
    VariationalParams p;
    p.dim = dim;
    p.K = k;
    p.means.resize(static_cast<std::size_t>(k) * dim);
    p.log_sigma2.resize(static_cast<std::size_t>(k));
    for (auto& m : p.means) m = rng.normal();
    for (auto& s : p.log_sigma2) s = 0.5 * rng.normal();
    return p;
}

// two-mode synthetic target with analytic derivatives
class BimodalModel : public Model {
  public:
    BimodalModel(double mode, double var) : Model(1, 1.0), mode_(mode), var_(var) {}

    double log_joint(std::span<const double> theta) const override {
        return std::log(0.5 * pdf(theta[0], -mode_) + 0.5 * pdf(theta[0], mode_));
    }
    std::vector<double> grad(std::span<const double> theta) const override {
        const double t = theta[0];
        const double pa = 0.5 * pdf(t, -mode_);
        const double pb = 0.5 * pdf(t, mode_);
        return {(pa * (-mode_ - t) + pb * (mode_ - t)) / ((pa + pb) * var_)};
    }
    double hessian_trace(std::span<const double> theta) const override {
        const double t = theta[0];
        const double pa = 0.5 * pdf(t, -mode_);
        const double pb = 0.5 * pdf(t, mode_);
        const double f = pa + pb;
        const double g = (pa * (-mode_ - t) + pb * (mode_ - t)) / (f * var_);
        const double second = (pa * ((-mode_ - t) * (-mode_ - t) / (var_ * var_) - 1.0 / var_) +
                               pb * ((mode_ - t) * (mode_ - t) / (var_ * var_) - 1.0 / var_)) / f;
        return second - g * g;
    }

  private:
    double pdf(double x, double mu) const {
        return std::exp(-0.5 * (x - mu) * (x - mu) / var_) / std::sqrt(2.0 * 3.14159265358979323846 * var_);
    }
    double mode_;
    double var_;
};

}  // namespace

TEST_CASE("surrogate value: hand-computed standard normal case") {
    const auto model = standard_normal_model(1);
    VariationalParams p;
    p.dim = 1;
    p.K = 1;
    p.means = {0.0};
    p.log_sigma2 = {0.0};
    // log f(0) = -log(2pi)/2, curvature = -1/2, entropy = log(4pi)/2
    const double expect = -0.9189385332046727 - 0.5 + 1.2655121234846454;
    CHECK(surrogate_elbo(p, model) == doctest::Approx(expect).epsilon(1e-12));

    const auto terms = surrogate_terms(p, model);
    CHECK(terms.expected_log_joint == doctest::Approx(-0.9189385332046727).epsilon(1e-12));
    CHECK(terms.curvature == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(terms.entropy == doctest::Approx(1.2655121234846454).epsilon(1e-12));
}

TEST_CASE("surrogate entropy: single-component closed form") {
    const auto model = standard_normal_model(3);
    Rng rng(5);
    for (int rep = 0; rep < 5; ++rep) {
        auto p = random_params(rng, 3, 1);
        const auto terms = surrogate_terms(p, model);
        const double sigma2 = std::exp(p.log_sigma2[0]);
        CHECK(terms.entropy ==
              doctest::Approx(1.5 * std::log(4.0 * 3.14159265358979323846 * sigma2)).epsilon(1e-12));
    }
}

TEST_CASE("surrogate value matches a straight-line reimplementation") {
    LogisticModelConfig config{4, 1.0, 1.0};
    const auto gen = generate_logistic(config, 30, 0.0, 19);
    LogisticModel model(config, DataShard{0, gen.train}, 0.5);

    Rng rng(23);
    for (int rep = 0; rep < 10; ++rep) {
        const auto p = random_params(rng, 5, 3);
        double naive = 0.0;
        for (int k = 0; k < p.K; ++k) {
            naive += model.log_joint(p.mean(k)) +
                     0.5 * std::exp(p.log_sigma2[static_cast<std::size_t>(k)]) *
                         model.hessian_trace(p.mean(k));
        }
        naive /= p.K;
        for (int k = 0; k < p.K; ++k) {
            double inner = 0.0;
            for (int j = 0; j < p.K; ++j) {
                const double v = std::exp(p.log_sigma2[static_cast<std::size_t>(k)]) +
                                 std::exp(p.log_sigma2[static_cast<std::size_t>(j)]);
                inner += naive_normal_pdf(p.mean(k), p.mean(j), v);
            }
            naive -= std::log(inner / p.K) / p.K;
        }
        const double got = surrogate_elbo(p, model);
        CHECK(std::fabs(got - naive) <= 1e-12 * std::max(1.0, std::fabs(naive)));
    }
}

TEST_CASE("surrogate gradient: log-variance block matches full finite differences") {
    LogisticModelConfig config{3, 1.0, 1.0};
    const auto gen = generate_logistic(config, 25, 0.0, 37);
    LogisticModel model(config, DataShard{0, gen.train}, 1.0);

    Rng rng(41);
    for (int rep = 0; rep < 20; ++rep) {
        auto p = random_params(rng, 4, 3);
        const auto grad = surrogate_elbo_grad(p, model);
        const double h = 1e-6;
        for (int k = 0; k < p.K; ++k) {
            const double keep = p.log_sigma2[static_cast<std::size_t>(k)];
            p.log_sigma2[static_cast<std::size_t>(k)] = keep + h;
            const double up = surrogate_elbo(p, model);
            p.log_sigma2[static_cast<std::size_t>(k)] = keep - h;
            const double down = surrogate_elbo(p, model);
            p.log_sigma2[static_cast<std::size_t>(k)] = keep;
            const double fd = (up - down) / (2.0 * h);
            CHECK(std::fabs(grad.log_sigma2[static_cast<std::size_t>(k)] - fd) <=
                  1e-4 * std::max(1.0, std::fabs(fd)));
        }
    }
}

TEST_CASE("surrogate gradient: mean block matches the trace-truncated objective") {
    LogisticModelConfig config{3, 1.0, 1.0};
    const auto gen = generate_logistic(config, 25, 0.0, 43);
    LogisticModel model(config, DataShard{0, gen.train}, 1.0);

    const auto truncated = [&](const VariationalParams& p) {
        const auto t = surrogate_terms(p, model);
        return t.expected_log_joint + t.entropy;  // curvature term omitted
    };

    Rng rng(47);
    for (int rep = 0; rep < 20; ++rep) {
        auto p = random_params(rng, 4, 2);
        const auto grad = surrogate_elbo_grad(p, model);
        const double h = 1e-6;
        for (std::size_t i = 0; i < p.means.size(); ++i) {
            const double keep = p.means[i];
            p.means[i] = keep + h;
            const double up = truncated(p);
            p.means[i] = keep - h;
            const double down = truncated(p);
            p.means[i] = keep;
            const double fd = (up - down) / (2.0 * h);
            CHECK(std::fabs(grad.means[i] - fd) <= 1e-4 * std::max(1.0, std::fabs(fd)));
        }
    }
}

TEST_CASE("surrogate gradient: conjugate stationary point for K=1") {
    GaussianToyConfig config{{0.4}, 2.0, 1.0};
    const auto gen = generate_gaussian(config, 15, 0.0, 53);
    GaussianToyModel model(config, DataShard{0, gen.train}, 1.0);
    const auto post = model.analytic_subposterior();

    VariationalParams p;
    p.dim = 1;
    p.K = 1;
    p.means = {post.mean[0]};
    p.log_sigma2 = {0.3};
    const auto grad = surrogate_elbo_grad(p, model);
    CHECK(std::fabs(grad.means[0]) < 1e-10);
}

TEST_CASE("fit recovers the conjugate posterior with K=1") {
    GaussianToyConfig config{{0.0}, 4.0, 1.0};
    const auto gen = generate_gaussian(config, 40, 0.0, 67);
    GaussianToyModel model(config, DataShard{0, gen.train}, 1.0);
    const auto post = model.analytic_subposterior();

    FitConfig fc;
    fc.K = 1;
    fc.rel_tol = 1e-10;
    Rng rng(2);
    const auto [mixture, report] = fit(model, fc, rng);
    CHECK(report.converged);
    CHECK(std::fabs(mixture.component(0).mean[0] - post.mean[0]) < 1e-3);
    CHECK(std::fabs(mixture.component(0).variance - post.variance) < 1e-2 * post.variance);
}

TEST_CASE("fit with tempering matches the analytic tempered subposterior") {
    GaussianToyConfig config{{0.5}, 2.0, 0.8};
    const auto gen = generate_gaussian(config, 24, 0.0, 71);
    const double beta = 0.25;  // M = 4
    GaussianToyModel model(config, DataShard{0, gen.train}, beta);
    const auto post = model.analytic_subposterior();

    FitConfig fc;
    fc.K = 1;
    fc.rel_tol = 1e-10;
    Rng rng(3);
    const auto [mixture, report] = fit(model, fc, rng);
    CHECK(std::fabs(mixture.component(0).mean[0] - post.mean[0]) < 1e-3);
    CHECK(std::fabs(mixture.component(0).variance - post.variance) < 1e-2 * post.variance);
}

TEST_CASE("fit separates a well-separated bimodal target with K=2") {
    BimodalModel model(2.0, 0.25);
    FitConfig fc;
    fc.K = 2;
    fc.rel_tol = 1e-9;
    Rng rng(11);
    const auto [mixture, report] = fit(model, fc, rng);
    double lo = mixture.component(0).mean[0];
    double hi = mixture.component(1).mean[0];
    if (lo > hi) std::swap(lo, hi);
    CHECK(std::fabs(lo - (-2.0)) < 0.1);
    CHECK(std::fabs(hi - 2.0) < 0.1);
}

TEST_CASE("fit ascends monotonically on a Gaussian target with K=4") {
    // constant Hessian trace means the mean block's accepted steps improve
    // the full bound too, so the whole iteration trace must be monotone
    GaussianToyConfig config{{0.3, -0.2}, 2.0, 1.0};
    const auto gen = generate_gaussian(config, 30, 0.0, 73);
    GaussianToyModel model(config, DataShard{0, gen.train}, 1.0);

    FitConfig fc;
    fc.K = 4;
    fc.record_trace = true;
    Rng rng(5);
    const auto [params, report] = fit_params(model, fc, rng);
    CHECK(report.iterations <= fc.max_iters);
    REQUIRE(report.trace.size() >= 2);
    for (std::size_t i = 1; i < report.trace.size(); ++i)
        CHECK(report.trace[i] >= report.trace[i - 1] - 1e-12);
}

TEST_CASE("fit improves the objective and honors the iteration budget") {
    LogisticModelConfig config{3, 1.0, 1.0};
    const auto gen = generate_logistic(config, 60, 0.0, 73);
    LogisticModel model(config, DataShard{0, gen.train}, 1.0);

    FitConfig fc;
    fc.K = 4;
    fc.record_trace = true;
    Rng rng(5);
    const auto [params, report] = fit_params(model, fc, rng);
    CHECK(report.iterations <= fc.max_iters);
    REQUIRE(report.trace.size() >= 2);
    CHECK(report.objective > report.trace.front());

    // each accepted log-variance step improves the full bound and each
    // accepted mean step improves the truncated bound; at convergence the
    // combined reported gradient is small
    const auto grad = surrogate_elbo_grad(params, model);
    double norm = 0.0;
    for (const double v : grad.means) norm = std::max(norm, std::fabs(v));
    for (const double v : grad.log_sigma2) norm = std::max(norm, std::fabs(v));
    CHECK(norm < 1e-2 * std::max(1.0, std::fabs(report.objective)));
}

TEST_CASE("fit is bitwise deterministic given the seed") {
    LogisticModelConfig config{3, 1.0, 1.0};
    const auto gen = generate_logistic(config, 40, 0.0, 79);
    LogisticModel model(config, DataShard{0, gen.train}, 1.0);

    FitConfig fc;
    fc.K = 3;
    fc.max_iters = 400;
    Rng r1(99);
    Rng r2(99);
    const auto [p1, rep1] = fit_params(model, fc, r1);
    const auto [p2, rep2] = fit_params(model, fc, r2);
    CHECK(rep1.iterations == rep2.iterations);
    REQUIRE(p1.means.size() == p2.means.size());
    CHECK(std::memcmp(p1.means.data(), p2.means.data(), p1.means.size() * sizeof(double)) == 0);
    CHECK(std::memcmp(p1.log_sigma2.data(), p2.log_sigma2.data(),
                      p1.log_sigma2.size() * sizeof(double)) == 0);
}

TEST_CASE("fit reports initialization failure on a hopeless model") {
    // a model that is non-finite everywhere
    class BrokenModel : public Model {
      public:
        BrokenModel() : Model(1, 1.0) {}
        double log_joint(std::span<const double>) const override {
            return std::numeric_limits<double>::quiet_NaN();
        }
        std::vector<double> grad(std::span<const double>) const override { return {0.0}; }
        double hessian_trace(std::span<const double>) const override { return 0.0; }
    };
    BrokenModel model;
    FitConfig fc;
    fc.K = 2;
    Rng rng(1);
    CHECK_THROWS_WITH_AS(fit(model, fc, rng),
                         doctest::Contains("initialization failure"), std::runtime_error);
}
