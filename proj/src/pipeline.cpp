#include "epvi/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <future>
#include <numeric>

namespace epvi {

std::vector<std::size_t> partition_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = rng.bounded(i);
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

ShardManifest partition(std::size_t n_rows, int M, std::uint64_t seed) {
    if (M < 1) throw std::invalid_argument("partition: M must be >= 1");
    if (static_cast<std::size_t>(M) > n_rows)
        throw std::invalid_argument("partition: M=" + std::to_string(M) +
                                    " exceeds row count " + std::to_string(n_rows));
    ShardManifest manifest;
    manifest.M = M;
    manifest.prior_temper = 1.0 / M;
    manifest.partition_seed = seed;
    manifest.fit_seeds.resize(static_cast<std::size_t>(M));
    for (int m = 0; m < M; ++m)
        manifest.fit_seeds[static_cast<std::size_t>(m)] =
            Rng::derive(seed, static_cast<std::uint64_t>(m) + 1);

    const std::size_t base = n_rows / static_cast<std::size_t>(M);
    const std::size_t rem = n_rows % static_cast<std::size_t>(M);
    std::size_t cursor = 0;
    manifest.ranges.resize(static_cast<std::size_t>(M));
    for (int m = 0; m < M; ++m) {
        const std::size_t size = base + (static_cast<std::size_t>(m) < rem ? 1 : 0);
        manifest.ranges[static_cast<std::size_t>(m)] = {cursor, cursor + size};
        cursor += size;
    }
    return manifest;
}

DataShard shard_view(const Dataset& data, const ShardManifest& manifest, int m) {
    if (m < 0 || m >= manifest.M) throw std::out_of_range("shard_view: bad shard id");
    const auto perm = partition_permutation(data.rows, manifest.partition_seed);
    const auto& range = manifest.ranges[static_cast<std::size_t>(m)];
    const std::span<const std::size_t> rows(perm.data() + range.begin,
                                            range.end - range.begin);
    return DataShard{m, data.select(rows)};
}

RunLedger run_parallel_fits(const Dataset& train, const ShardManifest& manifest,
                            const ModelFactory& factory, const FitConfig& fit_config) {
    if (manifest.param_paths.size() != static_cast<std::size_t>(manifest.M))
        throw std::invalid_argument("run_parallel_fits: manifest has no parameter paths");

    RunLedger ledger;
    ledger.fit_reports.resize(static_cast<std::size_t>(manifest.M));

    std::vector<std::future<void>> jobs;
    jobs.reserve(static_cast<std::size_t>(manifest.M));
    for (int m = 0; m < manifest.M; ++m) {
        jobs.push_back(std::async(std::launch::async, [&, m] {
            DataShard shard = shard_view(train, manifest, m);
            const std::size_t rows = shard.rows();
            const auto model = factory(std::move(shard), manifest.prior_temper);
            Rng rng(manifest.fit_seeds[static_cast<std::size_t>(m)]);
            auto [mixture, report] = fit(*model, fit_config, rng);
            report.shard_id = m;
            report.rows = rows;
            io::MixtureMeta meta{m, manifest.M, manifest.prior_temper};
            io::write_mixture(manifest.param_paths[static_cast<std::size_t>(m)], mixture, meta);
            ledger.fit_reports[static_cast<std::size_t>(m)] = std::move(report);
        }));
    }

    std::string failed;
    for (int m = 0; m < manifest.M; ++m) {
        try {
            jobs[static_cast<std::size_t>(m)].get();
        } catch (const std::exception& e) {
            if (!failed.empty()) failed += ", ";
            failed += std::to_string(m) + " (" + e.what() + ")";
        }
    }
    if (!failed.empty())
        throw std::runtime_error("run_parallel_fits: fit failed for shard(s) " + failed);

    for (const auto& r : ledger.fit_reports)
        ledger.max_fit_seconds = std::max(ledger.max_fit_seconds, r.seconds);
    return ledger;
}

CombineMethod parse_combine_method(const std::string& name) {
    if (name == "exact") return CombineMethod::exact;
    if (name == "sample") return CombineMethod::sample;
    if (name == "pairwise") return CombineMethod::pairwise;
    throw std::invalid_argument("unknown combine method: " + name);
}

std::string combine_method_name(CombineMethod m) {
    switch (m) {
        case CombineMethod::exact: return "exact";
        case CombineMethod::sample: return "sample";
        case CombineMethod::pairwise: return "pairwise";
    }
    return "?";
}

CombineResult collect_and_combine(const ShardManifest& manifest, CombineMethod method,
                                  const SamplerConfig& sampler_config, std::uint64_t cap,
                                  RunLedger& ledger) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<MixtureApprox> mixtures;
    mixtures.reserve(static_cast<std::size_t>(manifest.M));
    for (int m = 0; m < manifest.M; ++m) {
        const auto& path = manifest.param_paths[static_cast<std::size_t>(m)];
        try {
            const auto doc = io::read_json(path);
            ledger.transfer_scalars += io::payload_scalar_count(doc);
            ledger.transfer_bytes += std::filesystem::file_size(path);
            auto [mixture, meta] = io::read_mixture(path);
            (void)meta;
            mixtures.push_back(std::move(mixture));
        } catch (const std::exception& e) {
            throw std::runtime_error("collect_and_combine: shard " + std::to_string(m) +
                                     " parameter file unusable (" + path + "): " + e.what());
        }
    }
    ledger.transfer_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const auto t1 = std::chrono::steady_clock::now();
    CombineResult result;
    result.method = method;
    result.dim = mixtures.front().dim();
    switch (method) {
        case CombineMethod::exact:
            result.enumeration = enumerate_product(mixtures, cap);
            break;
        case CombineMethod::sample:
            result.samples = sample_components(mixtures, sampler_config);
            break;
        case CombineMethod::pairwise:
            // a single mixture has nothing to pair; fall back to the chain
            if (manifest.M == 1)
                result.samples = sample_components(mixtures, sampler_config);
            else
                result.samples = pairwise_reduce(mixtures, sampler_config.R, sampler_config);
            break;
    }
    ledger.combine_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
    return result;
}

io::json manifest_to_json(const ShardManifest& manifest) {
    io::json doc;
    doc["M"] = manifest.M;
    doc["prior_temper"] = manifest.prior_temper;
    doc["partition_seed"] = manifest.partition_seed;
    doc["fit_seeds"] = manifest.fit_seeds;
    io::json ranges = io::json::array();
    for (const auto& r : manifest.ranges) ranges.push_back({{"begin", r.begin}, {"end", r.end}});
    doc["ranges"] = std::move(ranges);
    doc["param_paths"] = manifest.param_paths;
    doc["dataset_path"] = manifest.dataset_path;
    return doc;
}

ShardManifest manifest_from_json(const io::json& doc) {
    ShardManifest manifest;
    manifest.M = doc.at("M").get<int>();
    manifest.prior_temper = doc.at("prior_temper").get<double>();
    manifest.partition_seed = doc.at("partition_seed").get<std::uint64_t>();
    manifest.fit_seeds = doc.at("fit_seeds").get<std::vector<std::uint64_t>>();
    for (const auto& r : doc.at("ranges"))
        manifest.ranges.push_back({r.at("begin").get<std::size_t>(), r.at("end").get<std::size_t>()});
    manifest.param_paths = doc.at("param_paths").get<std::vector<std::string>>();
    manifest.dataset_path = doc.at("dataset_path").get<std::string>();
    return manifest;
}

RunLedger ledger_from_json(const io::json& doc) {
    RunLedger ledger;
    for (const auto& r : doc.at("fit_reports")) {
        FitReport report;
        report.shard_id = r.at("shard_id").get<int>();
        report.rows = r.at("rows").get<std::size_t>();
        report.objective = r.at("objective").get<double>();
        report.iterations = r.at("iterations").get<int>();
        report.converged = r.at("converged").get<bool>();
        report.seconds = r.at("seconds").get<double>();
        ledger.fit_reports.push_back(std::move(report));
    }
    ledger.transfer_scalars = doc.at("transfer_scalars").get<std::size_t>();
    ledger.transfer_bytes = doc.at("transfer_bytes").get<std::size_t>();
    ledger.max_fit_seconds = doc.at("max_fit_seconds").get<double>();
    ledger.transfer_seconds = doc.at("transfer_seconds").get<double>();
    ledger.combine_seconds = doc.at("combine_seconds").get<double>();
    return ledger;
}

io::json ledger_to_json(const RunLedger& ledger) {
    io::json doc;
    io::json reports = io::json::array();
    for (const auto& r : ledger.fit_reports) {
        reports.push_back({{"shard_id", r.shard_id},
                           {"rows", r.rows},
                           {"objective", r.objective},
                           {"iterations", r.iterations},
                           {"converged", r.converged},
                           {"seconds", r.seconds}});
    }
    doc["fit_reports"] = std::move(reports);
    doc["transfer_scalars"] = ledger.transfer_scalars;
    doc["transfer_bytes"] = ledger.transfer_bytes;
    doc["max_fit_seconds"] = ledger.max_fit_seconds;
    doc["transfer_seconds"] = ledger.transfer_seconds;
    doc["combine_seconds"] = ledger.combine_seconds;
    return doc;
}

}  // namespace epvi
