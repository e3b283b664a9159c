#include "epvi/mixture.hpp"

#include <cmath>
#include <cstring>

#include "epvi/kernels.hpp"

namespace epvi {

MixtureApprox::MixtureApprox(int dim, std::vector<GaussianComponent> components)
    : dim_(dim), components_(std::move(components)) {
    if (dim_ < 1) throw std::invalid_argument("MixtureApprox: dim must be >= 1");
    if (components_.empty()) throw std::invalid_argument("MixtureApprox: K must be >= 1");
    for (const auto& c : components_) {
        if (static_cast<int>(c.mean.size()) != dim_)
            throw std::invalid_argument("MixtureApprox: component mean has wrong dimension");
        if (!(c.variance > 0.0) || !std::isfinite(c.variance))
            throw std::invalid_argument("MixtureApprox: variance must be positive and finite");
        for (const double v : c.mean)
            if (!std::isfinite(v))
                throw std::invalid_argument("MixtureApprox: mean entries must be finite");
    }
}

double MixtureApprox::log_density(std::span<const double> theta) const {
    return mixture_log_density(*this, theta);
}

double mixture_log_density(const MixtureApprox& q, std::span<const double> theta) {
    if (static_cast<int>(theta.size()) != q.dim())
        throw std::invalid_argument("mixture_log_density: theta dimension mismatch");
    const int K = q.size();
    std::vector<double> lps(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        const auto& c = q.component(k);
        lps[static_cast<std::size_t>(k)] = log_normal_iso(theta, c.mean, c.variance);
    }
    return log_sum_exp(lps) - std::log(static_cast<double>(K));
}

void detail::product_component_unchecked(std::span<const MixtureApprox> mixtures,
                                         const ComponentIndex& index, ProductComponent& out) {
    const int M = static_cast<int>(mixtures.size());
    const int d = mixtures[0].dim();

    out.index = index;
    out.mean.assign(static_cast<std::size_t>(d), 0.0);

    double precision = 0.0;
    for (int m = 0; m < M; ++m) {
        const auto& c = mixtures[static_cast<std::size_t>(m)].component(index.ks[static_cast<std::size_t>(m)]);
        const double p = 1.0 / c.variance;
        precision += p;
        kernels::axpy(p, c.mean.data(), out.mean.data(), static_cast<std::size_t>(d));
    }
    out.variance = 1.0 / precision;
    for (auto& v : out.mean) v *= out.variance;

    // w = prod_m N_d(mu_m | mu_prod, sigma_m^2 I) / N_d(mu_prod | mu_prod, sigma_prod^2 I);
    // the denominator is (2 pi sigma_prod^2)^(-d/2), so dividing adds its log.
    double lw = 0.5 * static_cast<double>(d) * (kLog2Pi + std::log(out.variance));
    for (int m = 0; m < M; ++m) {
        const auto& c = mixtures[static_cast<std::size_t>(m)].component(index.ks[static_cast<std::size_t>(m)]);
        lw += log_normal_iso(c.mean, out.mean, c.variance);
    }
    out.log_weight = lw;
}

void product_component_into(std::span<const MixtureApprox> mixtures,
                            const ComponentIndex& index, ProductComponent& out) {
    const int M = static_cast<int>(mixtures.size());
    if (M < 1) throw std::invalid_argument("product_component: need at least one mixture");
    const int d = mixtures[0].dim();
    if (static_cast<int>(index.ks.size()) != M)
        throw std::invalid_argument("product_component: index length != M");
    for (int m = 0; m < M; ++m) {
        if (mixtures[static_cast<std::size_t>(m)].dim() != d)
            throw std::invalid_argument("product_component: mixtures disagree on dim");
        const int k = index.ks[static_cast<std::size_t>(m)];
        if (k < 0 || k >= mixtures[static_cast<std::size_t>(m)].size())
            throw std::invalid_argument("product_component: component index out of range");
    }
    detail::product_component_unchecked(mixtures, index, out);
}

ProductComponent product_component(std::span<const MixtureApprox> mixtures,
                                   const ComponentIndex& index) {
    ProductComponent out;
    product_component_into(mixtures, index, out);
    return out;
}

std::vector<ProductComponent> enumerate_product(std::span<const MixtureApprox> mixtures,
                                                std::uint64_t cap) {
    const int M = static_cast<int>(mixtures.size());
    if (M < 1) throw std::invalid_argument("enumerate_product: need at least one mixture");

    std::uint64_t total = 1;
    int max_k = 0;
    bool overflow = false;
    for (const auto& q : mixtures) {
        if (q.dim() != mixtures[0].dim())
            throw std::invalid_argument("enumerate_product: mixtures disagree on dim");
        const auto k = static_cast<std::uint64_t>(q.size());
        max_k = std::max(max_k, q.size());
        if (total > cap / k + 1) overflow = true;
        if (!overflow) total *= k;
    }
    if (overflow || total > cap) {
        throw EnumerationBlowupError(
            max_k, M, cap,
            "enumerate_product: exponential blowup, K=" + std::to_string(max_k) + ", M=" +
                std::to_string(M) + " gives more than cap=" + std::to_string(cap) +
                " product components");
    }

    std::vector<ProductComponent> out;
    out.reserve(static_cast<std::size_t>(total));
    ComponentIndex idx;
    idx.ks.assign(static_cast<std::size_t>(M), 0);
    for (std::uint64_t i = 0; i < total; ++i) {
        out.emplace_back();
        detail::product_component_unchecked(mixtures, idx, out.back());
        // odometer increment, last index fastest
        for (int m = M - 1; m >= 0; --m) {
            auto& k = idx.ks[static_cast<std::size_t>(m)];
            if (++k < mixtures[static_cast<std::size_t>(m)].size()) break;
            k = 0;
        }
    }
    return out;
}

std::vector<double> normalized_weights(std::span<const ProductComponent> components) {
    std::vector<double> lw(components.size());
    for (std::size_t i = 0; i < components.size(); ++i) lw[i] = components[i].log_weight;
    const double lse = log_sum_exp(lw);
    std::vector<double> w(components.size());
    for (std::size_t i = 0; i < components.size(); ++i) w[i] = std::exp(lw[i] - lse);
    return w;
}

std::vector<double> sample_theta(const ProductComponent& component, Rng& rng) {
    const double sd = std::sqrt(component.variance);
    std::vector<double> theta(component.mean.size());
    for (std::size_t i = 0; i < theta.size(); ++i)
        theta[i] = component.mean[i] + sd * rng.normal();
    return theta;
}

}  // namespace epvi
