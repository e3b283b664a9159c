#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "epvi/combine.hpp"
#include "epvi/mixture.hpp"
#include "epvi/model.hpp"

namespace epvi::io {

using json = nlohmann::json;

// shortest round-trip decimal text for a double
std::string format_double(double v);

json read_json(const std::string& path);
void write_json(const std::string& path, const json& doc);

// --- fitted mixture parameter files (key-value document) ------------------

struct MixtureMeta {
    int shard_id = 0;
    int M = 1;
    double prior_temper = 1.0;
};

// Document fields: version, dim, K, means (K x d), variances (K), weights
// (K explicit 1/K entries), meta {shard_id, M, prior_temper}. The payload
// arrays carry exactly K*(d+2) numeric scalars.
void write_mixture(const std::string& path, const MixtureApprox& mixture,
                   const MixtureMeta& meta);
std::pair<MixtureApprox, MixtureMeta> read_mixture(const std::string& path);

// number of scalars in the means/variances/weights arrays of a mixture doc
std::size_t payload_scalar_count(const json& doc);

// --- columnar numeric text -------------------------------------------------

void write_dataset(const std::string& path, const Dataset& data);
Dataset read_dataset(const std::string& path);

// Subsample loader for external labeled CSV data (binary label in the first
// column, features after it). Reads at most max_rows rows; 0 means all.
Dataset read_labeled_csv(const std::string& path, std::size_t max_rows = 0);

void write_component_samples(const std::string& path, const ComponentSampleSet& set);
ComponentSampleSet read_component_samples(const std::string& path);

void write_enumeration(const std::string& path, std::span<const ProductComponent> comps,
                       int dim);
std::vector<ProductComponent> read_enumeration(const std::string& path, int* dim_out = nullptr);

void write_draws(const std::string& path, const std::vector<std::vector<double>>& draws,
                 const std::string& method, std::uint64_t seed);
std::vector<std::vector<double>> read_draws(const std::string& path);

}  // namespace epvi::io
