#include "epvi/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace epvi::io {

namespace {

std::runtime_error file_error(const std::string& verb, const std::string& path) {
    return std::runtime_error("cannot " + verb + " file: " + path);
}

// "key=value" tokens from a '#' header line
std::unordered_map<std::string, std::string> parse_header(const std::string& line) {
    std::unordered_map<std::string, std::string> kv;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
        const auto eq = tok.find('=');
        if (eq != std::string::npos) kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return kv;
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw file_error("open", path);
    json doc;
    in >> doc;
    return doc;
}

void write_json(const std::string& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw file_error("write", path);
    out << doc.dump(2) << '\n';
}

void write_mixture(const std::string& path, const MixtureApprox& mixture,
                   const MixtureMeta& meta) {
    json doc;
    doc["version"] = 1;
    doc["dim"] = mixture.dim();
    doc["K"] = mixture.size();
    json means = json::array();
    json variances = json::array();
    json weights = json::array();
    const double w = 1.0 / mixture.size();
    for (const auto& c : mixture.components()) {
        means.push_back(c.mean);
        variances.push_back(c.variance);
        weights.push_back(w);
    }
    doc["means"] = std::move(means);
    doc["variances"] = std::move(variances);
    doc["weights"] = std::move(weights);
    doc["meta"] = {{"shard_id", meta.shard_id},
                   {"M", meta.M},
                   {"prior_temper", meta.prior_temper}};
    write_json(path, doc);
}

std::pair<MixtureApprox, MixtureMeta> read_mixture(const std::string& path) {
    const json doc = read_json(path);
    const int dim = doc.at("dim").get<int>();
    const int k = doc.at("K").get<int>();
    std::vector<GaussianComponent> comps;
    comps.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        GaussianComponent c;
        c.mean = doc.at("means").at(static_cast<std::size_t>(i)).get<std::vector<double>>();
        c.variance = doc.at("variances").at(static_cast<std::size_t>(i)).get<double>();
        comps.push_back(std::move(c));
    }
    MixtureMeta meta;
    const auto& m = doc.at("meta");
    meta.shard_id = m.at("shard_id").get<int>();
    meta.M = m.at("M").get<int>();
    meta.prior_temper = m.at("prior_temper").get<double>();
    return {MixtureApprox(dim, std::move(comps)), meta};
}

std::size_t payload_scalar_count(const json& doc) {
    std::size_t count = 0;
    for (const auto& row : doc.at("means")) count += row.size();
    count += doc.at("variances").size();
    count += doc.at("weights").size();
    return count;
}

void write_dataset(const std::string& path, const Dataset& data) {
    std::ofstream out(path);
    if (!out) throw file_error("write", path);
    out << "# epvi-dataset family=" << data.family << " rows=" << data.rows
        << " features=" << data.features << " outputs=" << data.outputs << '\n';
    for (std::size_t r = 0; r < data.rows; ++r) {
        bool first = true;
        for (const double v : data.x_row(r)) {
            if (!first) out << ' ';
            out << format_double(v);
            first = false;
        }
        for (const double v : data.y_row(r)) {
            if (!first) out << ' ';
            out << format_double(v);
            first = false;
        }
        out << '\n';
    }
}

Dataset read_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw file_error("open", path);
    std::string header;
    std::getline(in, header);
    if (header.empty() || header[0] != '#')
        throw std::runtime_error("read_dataset: missing header line in " + path);
    const auto kv = parse_header(header);
    Dataset data;
    data.family = kv.count("family") ? kv.at("family") : "";
    data.rows = std::stoull(kv.at("rows"));
    data.features = std::stoi(kv.at("features"));
    data.outputs = std::stoi(kv.at("outputs"));
    data.x.reserve(data.rows * static_cast<std::size_t>(data.features));
    data.y.reserve(data.rows * static_cast<std::size_t>(data.outputs));
    for (std::size_t r = 0; r < data.rows; ++r) {
        for (int c = 0; c < data.features; ++c) {
            double v;
            if (!(in >> v)) throw std::runtime_error("read_dataset: truncated row in " + path);
            data.x.push_back(v);
        }
        for (int c = 0; c < data.outputs; ++c) {
            double v;
            if (!(in >> v)) throw std::runtime_error("read_dataset: truncated row in " + path);
            data.y.push_back(v);
        }
    }
    return data;
}

Dataset read_labeled_csv(const std::string& path, std::size_t max_rows) {
    std::ifstream in(path);
    if (!in) throw file_error("open", path);
    Dataset data;
    data.family = "logistic";
    data.outputs = 1;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> fields;
        std::size_t start = 0;
        while (start <= line.size()) {
            const auto comma = line.find(',', start);
            const auto end = comma == std::string::npos ? line.size() : comma;
            fields.push_back(std::stod(line.substr(start, end - start)));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (fields.size() < 2)
            throw std::runtime_error("read_labeled_csv: need a label plus features in " + path);
        if (data.rows == 0) {
            data.features = static_cast<int>(fields.size()) - 1;
        } else if (static_cast<int>(fields.size()) - 1 != data.features) {
            throw std::runtime_error("read_labeled_csv: ragged row in " + path);
        }
        const double label = fields[0];
        if (label != 0.0 && label != 1.0)
            throw std::runtime_error("read_labeled_csv: labels must be 0 or 1 in " + path);
        data.y.push_back(label);
        data.x.insert(data.x.end(), fields.begin() + 1, fields.end());
        ++data.rows;
        if (max_rows > 0 && data.rows >= max_rows) break;
    }
    if (data.rows == 0) throw std::runtime_error("read_labeled_csv: no rows in " + path);
    return data;
}

void write_component_samples(const std::string& path, const ComponentSampleSet& set) {
    std::ofstream out(path);
    if (!out) throw file_error("write", path);
    out << "# epvi-components method=" << set.provenance.method << " M=" << set.provenance.M
        << " K=" << set.provenance.max_k << " R=" << set.provenance.R
        << " burn_in=" << set.provenance.burn_in << " seed=" << set.provenance.seed
        << " d=" << set.dim << " count=" << set.components.size() << '\n';
    out << "# columns: mean[0.." << set.dim - 1 << "] variance\n";
    for (const auto& c : set.components) {
        for (const double v : c.mean) out << format_double(v) << ' ';
        out << format_double(c.variance) << '\n';
    }
}

ComponentSampleSet read_component_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw file_error("open", path);
    std::string header;
    std::getline(in, header);
    const auto kv = parse_header(header);
    ComponentSampleSet set;
    set.dim = std::stoi(kv.at("d"));
    set.provenance.method = kv.count("method") ? kv.at("method") : "";
    set.provenance.M = std::stoi(kv.at("M"));
    set.provenance.max_k = std::stoi(kv.at("K"));
    set.provenance.R = std::stoi(kv.at("R"));
    set.provenance.burn_in = std::stoi(kv.at("burn_in"));
    set.provenance.seed = std::stoull(kv.at("seed"));
    const auto count = std::stoull(kv.at("count"));
    std::string comment;
    std::getline(in, comment);  // columns line
    set.components.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        SampledComponent c;
        c.mean.resize(static_cast<std::size_t>(set.dim));
        for (auto& v : c.mean)
            if (!(in >> v)) throw std::runtime_error("read_component_samples: truncated " + path);
        if (!(in >> c.variance))
            throw std::runtime_error("read_component_samples: truncated " + path);
        set.components.push_back(std::move(c));
    }
    return set;
}

void write_enumeration(const std::string& path, std::span<const ProductComponent> comps,
                       int dim) {
    std::ofstream out(path);
    if (!out) throw file_error("write", path);
    out << "# epvi-enumeration d=" << dim << " count=" << comps.size() << '\n';
    out << "# columns: log_weight mean[0.." << dim - 1 << "] variance\n";
    for (const auto& c : comps) {
        out << format_double(c.log_weight);
        for (const double v : c.mean) out << ' ' << format_double(v);
        out << ' ' << format_double(c.variance) << '\n';
    }
}

std::vector<ProductComponent> read_enumeration(const std::string& path, int* dim_out) {
    std::ifstream in(path);
    if (!in) throw file_error("open", path);
    std::string header;
    std::getline(in, header);
    const auto kv = parse_header(header);
    const int dim = std::stoi(kv.at("d"));
    const auto count = std::stoull(kv.at("count"));
    if (dim_out) *dim_out = dim;
    std::string comment;
    std::getline(in, comment);
    std::vector<ProductComponent> comps;
    comps.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        ProductComponent c;
        if (!(in >> c.log_weight))
            throw std::runtime_error("read_enumeration: truncated " + path);
        c.mean.resize(static_cast<std::size_t>(dim));
        for (auto& v : c.mean)
            if (!(in >> v)) throw std::runtime_error("read_enumeration: truncated " + path);
        if (!(in >> c.variance))
            throw std::runtime_error("read_enumeration: truncated " + path);
        comps.push_back(std::move(c));
    }
    return comps;
}

void write_draws(const std::string& path, const std::vector<std::vector<double>>& draws,
                 const std::string& method, std::uint64_t seed) {
    std::ofstream out(path);
    if (!out) throw file_error("write", path);
    const std::size_t d = draws.empty() ? 0 : draws.front().size();
    out << "# epvi-draws method=" << method << " S=" << draws.size() << " d=" << d
        << " seed=" << seed << '\n';
    for (const auto& theta : draws) {
        bool first = true;
        for (const double v : theta) {
            if (!first) out << ' ';
            out << format_double(v);
            first = false;
        }
        out << '\n';
    }
}

std::vector<std::vector<double>> read_draws(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw file_error("open", path);
    std::string header;
    std::getline(in, header);
    const auto kv = parse_header(header);
    const auto s = std::stoull(kv.at("S"));
    const auto d = std::stoull(kv.at("d"));
    std::vector<std::vector<double>> draws(s, std::vector<double>(d));
    for (auto& theta : draws)
        for (auto& v : theta)
            if (!(in >> v)) throw std::runtime_error("read_draws: truncated " + path);
    return draws;
}

}  // namespace epvi::io
