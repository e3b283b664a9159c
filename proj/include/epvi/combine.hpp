#pragma once

#include <cstdint>
#include <string>

#include "epvi/mixture.hpp"

namespace epvi {

struct SamplerConfig {
    int R = 500;          // retained component samples
    int burn_in = 1000;   // discarded leading steps
    std::uint64_t seed = 0;
    // Added to every computed component log-weight. Acceptance depends only
    // on weight ratios, so any finite shift must leave the chain unchanged;
    // exposed so tests can verify exactly that.
    double log_weight_shift = 0.0;
    // Recompute the cached log-weight from scratch every 1000 steps and
    // fail loudly on disagreement.
    bool paranoid_checks = false;
    // Fan the pairs of each pairwise round out to concurrent workers. Pair
    // seeds are derived per (round, pair), so the result is identical either
    // way; only in-round wall time changes.
    bool parallel_pairwise_rounds = false;
};

// Current position of the index chain plus its cached log-weight.
struct ChainState {
    ComponentIndex index;
    double log_weight = 0.0;
};

struct SampledComponent {
    std::vector<double> mean;
    double variance = 1.0;
};

struct SampleProvenance {
    std::string method;  // "sample" | "pairwise"
    int M = 0;
    int max_k = 0;
    int R = 0;
    int burn_in = 0;
    std::uint64_t seed = 0;
    std::string warning;  // non-fatal notes, e.g. R < K under-representation
};

// R retained product-mixture components in chain order. `indices` mirrors
// `components` for diagnostic use when the draws come from a single chain
// (empty after pairwise reduction, where index identity is per-round).
struct ComponentSampleSet {
    int dim = 0;
    std::vector<SampledComponent> components;
    std::vector<ComponentIndex> indices;
    SampleProvenance provenance;
};

// Metropolis-within-Gibbs over the product component index vector: pick a
// mixture uniformly, redraw its component uniformly, accept with probability
// min(1, w_new/w_old). After burn_in, the current component's (mean,
// variance) is recorded every step. Stationary distribution: categorical
// with mass proportional to the product component weights.
ComponentSampleSet sample_components(std::span<const MixtureApprox> mixtures,
                                     const SamplerConfig& config);

// Wall time and arithmetic cost model for a sampler run (R + burn_in steps).
struct StepCostProbe {
    std::size_t steps = 0;
    double seconds = 0.0;
    double seconds_per_step = 0.0;
    // per step: one candidate product component, O(d M) flops
    std::size_t ops_per_step = 0;
};

StepCostProbe step_cost_probe(std::span<const MixtureApprox> mixtures,
                              const SamplerConfig& config);

// Sequential pairwise subset products: pair mixtures in order ((1,2), (3,4),
// ...; odd leftover carried), sample R components from each pair product and
// treat them as a uniform R-component mixture, repeat for ceil(log2 M)
// rounds until one mixture remains.
ComponentSampleSet pairwise_reduce(std::span<const MixtureApprox> mixtures,
                                   int per_round_samples, const SamplerConfig& config);

// pair count per round for M inputs, e.g. M=5 -> {2, 1, 1}
std::vector<int> pairwise_round_pair_counts(int m);

// Draw theta vectors. Sampled sets already carry stationary component
// frequencies, so components are drawn uniformly; exact enumerations are
// drawn proportional to their normalized weights.
std::vector<std::vector<double>> draw_posterior_samples(const ComponentSampleSet& source,
                                                        std::size_t S, Rng& rng);
std::vector<std::vector<double>> draw_posterior_samples(
    std::span<const ProductComponent> enumeration, std::size_t S, Rng& rng);

}  // namespace epvi
