#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "epvi/math.hpp"

namespace epvi {

// One isotropic Gaussian: mean in R^d, a single shared variance.
struct GaussianComponent {
    std::vector<double> mean;
    double variance = 1.0;
};

// Uniformly weighted mixture of K isotropic Gaussians over R^d.
// Immutable after construction; the constructor validates the invariants
// (K >= 1, matching dims, finite means, positive finite variances).
class MixtureApprox {
  public:
    MixtureApprox(int dim, std::vector<GaussianComponent> components);

    int dim() const { return dim_; }
    int size() const { return static_cast<int>(components_.size()); }  // K
    const std::vector<GaussianComponent>& components() const { return components_; }
    const GaussianComponent& component(int k) const { return components_[static_cast<std::size_t>(k)]; }

    // log[(1/K) sum_k N_d(theta | mu_k, sigma_k^2 I)], evaluated via log-sum-exp
    double log_density(std::span<const double> theta) const;

  private:
    int dim_;
    std::vector<GaussianComponent> components_;
};

// Index vector (k_1, ..., k_M) selecting one component per mixture. 0-based.
struct ComponentIndex {
    std::vector<int> ks;

    bool operator==(const ComponentIndex& other) const { return ks == other.ks; }
};

// One of the prod_m K_m product components. log_weight is the natural log of
// the unnormalized weight; mean/variance are the product-Gaussian parameters.
struct ProductComponent {
    ComponentIndex index;
    double log_weight = 0.0;
    std::vector<double> mean;
    double variance = 1.0;
};

class EnumerationBlowupError : public std::runtime_error {
  public:
    EnumerationBlowupError(int max_k, int m, std::uint64_t cap, const std::string& what)
        : std::runtime_error(what), max_k(max_k), m(m), cap(cap) {}
    int max_k;
    int m;
    std::uint64_t cap;
};

double mixture_log_density(const MixtureApprox& q, std::span<const double> theta);

// Closed-form parameters of the product component selected by `index`:
//   variance = (sum_m 1/sigma_m^2)^-1
//   mean     = variance * sum_m mu_m / sigma_m^2
//   log w    = sum_m log N_d(mu_m | mean, sigma_m^2 I) + (d/2) log(2 pi variance)
ProductComponent product_component(std::span<const MixtureApprox> mixtures,
                                   const ComponentIndex& index);

// Workspace variant for hot loops; out.mean is resized as needed.
void product_component_into(std::span<const MixtureApprox> mixtures,
                            const ComponentIndex& index, ProductComponent& out);

namespace detail {
// no precondition checks; callers must have validated dims and index range
void product_component_unchecked(std::span<const MixtureApprox> mixtures,
                                 const ComponentIndex& index, ProductComponent& out);
}  // namespace detail

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

// All prod_m K_m product components in odometer order (last index fastest).
// Throws EnumerationBlowupError if the count exceeds `cap`.
std::vector<ProductComponent> enumerate_product(std::span<const MixtureApprox> mixtures,
                                                std::uint64_t cap = kDefaultEnumerationCap);

// Softmax of the log_weights; sums to 1.
std::vector<double> normalized_weights(std::span<const ProductComponent> components);

// Draw theta ~ N_d(mean, variance I)
std::vector<double> sample_theta(const ProductComponent& component, Rng& rng);

}  // namespace epvi
