#include "epvi/combine.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <cmath>

namespace epvi {

namespace {

void validate_shared_dim(std::span<const MixtureApprox> mixtures) {
    if (mixtures.empty())
        throw std::invalid_argument("combiner: need at least one mixture");
    const int d = mixtures[0].dim();
    for (const auto& q : mixtures)
        if (q.dim() != d) throw std::invalid_argument("combiner: mixtures disagree on dim");
}

int max_component_count(std::span<const MixtureApprox> mixtures) {
    int k = 0;
    for (const auto& q : mixtures) k = std::max(k, q.size());
    return k;
}

// shared chain loop; record receives the retained state each kept step
template <typename Record>
void run_chain(std::span<const MixtureApprox> mixtures, const SamplerConfig& config,
               Record&& record) {
    const int m_count = static_cast<int>(mixtures.size());
    Rng rng(config.seed);

    ChainState state;
    state.index.ks.resize(static_cast<std::size_t>(m_count));
    for (int m = 0; m < m_count; ++m)
        state.index.ks[static_cast<std::size_t>(m)] =
            static_cast<int>(rng.bounded(static_cast<std::uint64_t>(mixtures[static_cast<std::size_t>(m)].size())));

    ProductComponent current;
    detail::product_component_unchecked(mixtures, state.index, current);
    state.log_weight = current.log_weight + config.log_weight_shift;

    ProductComponent candidate;
    ComponentIndex cand_index = state.index;

    const long total = static_cast<long>(config.burn_in) + config.R;
    for (long s = 1; s <= total; ++s) {
        const int m = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(m_count)));
        cand_index.ks = state.index.ks;
        cand_index.ks[static_cast<std::size_t>(m)] = static_cast<int>(
            rng.bounded(static_cast<std::uint64_t>(mixtures[static_cast<std::size_t>(m)].size())));

        detail::product_component_unchecked(mixtures, cand_index, candidate);
        const double cand_lw = candidate.log_weight + config.log_weight_shift;
        const double log_ratio = cand_lw - state.log_weight;
        bool accept = log_ratio >= 0.0;
        if (!accept) accept = rng.uniform() < std::exp(log_ratio);
        if (accept) {
            state.index.ks = cand_index.ks;
            state.log_weight = cand_lw;
            std::swap(current, candidate);
        }

        if (config.paranoid_checks && s % 1000 == 0) {
            ProductComponent fresh;
            product_component_into(mixtures, state.index, fresh);
            if (fresh.log_weight + config.log_weight_shift != state.log_weight)
                throw std::logic_error("sample_components: cached log-weight drifted");
        }

        if (s > config.burn_in) record(current, state.index);
    }
}

}  // namespace

ComponentSampleSet sample_components(std::span<const MixtureApprox> mixtures,
                                     const SamplerConfig& config) {
    validate_shared_dim(mixtures);
    if (config.R < 1) throw std::invalid_argument("sample_components: R must be >= 1");
    if (config.burn_in < 0)
        throw std::invalid_argument("sample_components: burn_in must be >= 0");

    ComponentSampleSet out;
    out.dim = mixtures[0].dim();
    out.components.reserve(static_cast<std::size_t>(config.R));
    out.indices.reserve(static_cast<std::size_t>(config.R));
    run_chain(mixtures, config, [&](const ProductComponent& c, const ComponentIndex& idx) {
        out.components.push_back(SampledComponent{c.mean, c.variance});
        out.indices.push_back(idx);
    });

    out.provenance.method = "sample";
    out.provenance.M = static_cast<int>(mixtures.size());
    out.provenance.max_k = max_component_count(mixtures);
    out.provenance.R = config.R;
    out.provenance.burn_in = config.burn_in;
    out.provenance.seed = config.seed;
    return out;
}

StepCostProbe step_cost_probe(std::span<const MixtureApprox> mixtures,
                              const SamplerConfig& config) {
    validate_shared_dim(mixtures);
    const auto d = static_cast<std::size_t>(mixtures[0].dim());
    const auto m_count = mixtures.size();

    StepCostProbe probe;
    probe.steps = static_cast<std::size_t>(config.burn_in) + static_cast<std::size_t>(config.R);
    // candidate product component: M precision/mean accumulations and M
    // weight terms over d dims, plus the harmonic and acceptance scalars
    probe.ops_per_step = m_count * (4 * d + 8) + 2 * d + 16;

    const auto start = std::chrono::steady_clock::now();
    std::size_t kept = 0;
    run_chain(mixtures, config, [&](const ProductComponent&, const ComponentIndex&) { ++kept; });
    probe.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    probe.seconds_per_step = probe.seconds / static_cast<double>(probe.steps);
    (void)kept;
    return probe;
}

std::vector<int> pairwise_round_pair_counts(int m) {
    std::vector<int> counts;
    while (m > 1) {
        counts.push_back(m / 2);
        m = m / 2 + m % 2;
    }
    return counts;
}

ComponentSampleSet pairwise_reduce(std::span<const MixtureApprox> mixtures,
                                   int per_round_samples, const SamplerConfig& config) {
    validate_shared_dim(mixtures);
    if (mixtures.size() < 2)
        throw std::invalid_argument("pairwise_reduce: need M >= 2 mixtures");
    if (per_round_samples < 1)
        throw std::invalid_argument("pairwise_reduce: per-round sample count must be >= 1");

    std::string warning;
    if (per_round_samples < max_component_count(mixtures))
        warning = "per-round R < K: sampled mixtures may under-represent components";

    std::vector<MixtureApprox> work(mixtures.begin(), mixtures.end());

    ComponentSampleSet last;
    std::uint64_t round = 0;
    while (work.size() > 1) {
        const std::size_t pairs = work.size() / 2;
        const auto run_pair = [&](std::size_t p) {
            SamplerConfig pair_config = config;
            pair_config.R = per_round_samples;
            pair_config.seed = Rng::derive(config.seed, (round << 32) | p);
            const MixtureApprox pair[2] = {work[2 * p], work[2 * p + 1]};
            return sample_components({pair, 2}, pair_config);
        };

        std::vector<ComponentSampleSet> round_sets(pairs);
        if (config.parallel_pairwise_rounds && pairs > 1) {
            std::vector<std::future<ComponentSampleSet>> jobs;
            jobs.reserve(pairs);
            for (std::size_t p = 0; p < pairs; ++p)
                jobs.push_back(std::async(std::launch::async, run_pair, p));
            for (std::size_t p = 0; p < pairs; ++p) round_sets[p] = jobs[p].get();
        } else {
            for (std::size_t p = 0; p < pairs; ++p) round_sets[p] = run_pair(p);
        }

        std::vector<MixtureApprox> next;
        next.reserve(pairs + 1);
        for (std::size_t p = 0; p < pairs; ++p) {
            std::vector<GaussianComponent> comps;
            comps.reserve(round_sets[p].components.size());
            for (const auto& c : round_sets[p].components)
                comps.push_back(GaussianComponent{c.mean, c.variance});
            next.emplace_back(round_sets[p].dim, std::move(comps));
        }
        last = std::move(round_sets.back());
        if (work.size() % 2 == 1) next.push_back(std::move(work.back()));
        work = std::move(next);
        ++round;
    }

    last.provenance.method = "pairwise";
    last.provenance.M = static_cast<int>(mixtures.size());
    last.provenance.max_k = max_component_count(mixtures);
    last.provenance.R = per_round_samples;
    last.provenance.burn_in = config.burn_in;
    last.provenance.seed = config.seed;
    last.provenance.warning = warning;
    last.indices.clear();  // per-round indices are meaningless for the result
    return last;
}

std::vector<std::vector<double>> draw_posterior_samples(const ComponentSampleSet& source,
                                                        std::size_t S, Rng& rng) {
    if (source.components.empty())
        throw std::invalid_argument("draw_posterior_samples: empty component set");
    std::vector<std::vector<double>> draws;
    draws.reserve(S);
    for (std::size_t s = 0; s < S; ++s) {
        const auto& c = source.components[rng.bounded(source.components.size())];
        const double sd = std::sqrt(c.variance);
        std::vector<double> theta(c.mean.size());
        for (std::size_t i = 0; i < theta.size(); ++i)
            theta[i] = c.mean[i] + sd * rng.normal();
        draws.push_back(std::move(theta));
    }
    return draws;
}

std::vector<std::vector<double>> draw_posterior_samples(
    std::span<const ProductComponent> enumeration, std::size_t S, Rng& rng) {
    if (enumeration.empty())
        throw std::invalid_argument("draw_posterior_samples: empty enumeration");
    const auto weights = normalized_weights(enumeration);
    std::vector<double> cdf(weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0;

    std::vector<std::vector<double>> draws;
    draws.reserve(S);
    for (std::size_t s = 0; s < S; ++s) {
        const double u = rng.uniform();
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        const auto i = static_cast<std::size_t>(it - cdf.begin());
        draws.push_back(sample_theta(enumeration[i], rng));
    }
    return draws;
}

}  // namespace epvi
