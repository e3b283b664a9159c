#pragma once

#include <functional>
#include <memory>

#include "epvi/combine.hpp"
#include "epvi/io.hpp"
#include "epvi/nvi.hpp"

namespace epvi {

// One-shot parallel pipeline: partition rows, fit each shard independently,
// collect the parameter files once, combine. Workers exchange nothing but
// those files.

struct ShardRange {
    std::size_t begin = 0;  // into the permuted row order
    std::size_t end = 0;
};

struct ShardManifest {
    int M = 1;
    double prior_temper = 1.0;
    std::uint64_t partition_seed = 0;
    std::vector<std::uint64_t> fit_seeds;    // one per shard
    std::vector<ShardRange> ranges;          // disjoint, exhaustive
    std::vector<std::string> param_paths;    // one per shard
    std::string dataset_path;
};

// Fisher-Yates permutation of {0..N-1}; the partition's one source of randomness.
std::vector<std::size_t> partition_permutation(std::size_t n, std::uint64_t seed);

// Random permutation, then contiguous blocks of size N/M with the remainder
// spread one row per shard from the front. prior_temper = 1/M.
ShardManifest partition(std::size_t n_rows, int M, std::uint64_t seed);

// Materialize shard m's rows (copies them; fits never touch shared state).
DataShard shard_view(const Dataset& data, const ShardManifest& manifest, int m);

struct RunLedger {
    std::vector<FitReport> fit_reports;
    std::size_t transfer_scalars = 0;
    std::size_t transfer_bytes = 0;
    double max_fit_seconds = 0.0;  // parallel-phase cost: max over shards
    double transfer_seconds = 0.0;
    double combine_seconds = 0.0;
};

using ModelFactory =
    std::function<std::unique_ptr<Model>(DataShard shard, double prior_temper)>;

// Fit all shards concurrently; each worker sees only its DataShard and writes
// only its manifest-assigned parameter file. Throws listing the failed shard
// ids if any fit fails.
RunLedger run_parallel_fits(const Dataset& train, const ShardManifest& manifest,
                            const ModelFactory& factory, const FitConfig& fit_config);

enum class CombineMethod { exact, sample, pairwise };

CombineMethod parse_combine_method(const std::string& name);
std::string combine_method_name(CombineMethod m);

struct CombineResult {
    CombineMethod method = CombineMethod::sample;
    int dim = 0;
    std::vector<ProductComponent> enumeration;  // exact only
    ComponentSampleSet samples;                 // sample/pairwise only
};

// The single collection event: read the M parameter files (counting the
// scalars moved), then dispatch to the requested combiner.
CombineResult collect_and_combine(const ShardManifest& manifest, CombineMethod method,
                                  const SamplerConfig& sampler_config, std::uint64_t cap,
                                  RunLedger& ledger);

io::json manifest_to_json(const ShardManifest& manifest);
ShardManifest manifest_from_json(const io::json& doc);
io::json ledger_to_json(const RunLedger& ledger);
RunLedger ledger_from_json(const io::json& doc);

}  // namespace epvi
