#pragma once

#include "epvi/models/gaussian_toy.hpp"
#include "epvi/models/logistic.hpp"
#include "epvi/models/tlsa.hpp"
#include "epvi/pipeline.hpp"

namespace epvi {

// Model family plus the hyperparameters needed to build shard models and
// evaluate predictive likelihoods.
struct FamilyConfig {
    std::string family;  // "gaussian" | "logistic" | "tlsa"
    models::GaussianToyConfig gaussian;
    models::LogisticModelConfig logistic;
    models::TlsaModelConfig tlsa;
};

io::json family_config_to_json(const FamilyConfig& config);
FamilyConfig family_config_from_json(const io::json& doc);

ModelFactory make_model_factory(const FamilyConfig& config);

struct EvalResult {
    std::string method;
    double nll_per_datum = 0.0;  // negative held-out predictive log-lik per row
    double nll_se = 0.0;         // standard error over test rows
    double nll_mc_se = 0.0;      // Monte Carlo error from the finite draw count
    double accuracy = 0.0;       // logistic only
    bool has_accuracy = false;
    std::size_t test_rows = 0;
    std::size_t draw_count = 0;
    double max_fit_seconds = 0.0;
    double transfer_seconds = 0.0;
    double combine_seconds = 0.0;
    io::json config_echo;
};

io::json eval_result_to_json(const EvalResult& r);

// Predictive log-likelihood per test row, log-sum-exp averaged over draws;
// for logistic data also the plug-in classification accuracy.
EvalResult heldout_metrics(const std::vector<std::vector<double>>& draws,
                           const Dataset& test, const FamilyConfig& config);

// ---- one-call pipeline (partition -> parallel fits -> combine -> draws) ----

struct PipelineSpec {
    FamilyConfig model;
    int M = 5;
    FitConfig fit;
    SamplerConfig sampler;
    CombineMethod method = CombineMethod::sample;
    std::uint64_t cap = kDefaultEnumerationCap;
    std::size_t posterior_draws = 1000;  // S
    std::uint64_t seed = 0;
    std::string work_dir;  // parameter files are exchanged here
};

struct PipelineOutcome {
    ShardManifest manifest;
    RunLedger ledger;
    CombineResult combined;
    std::vector<std::vector<double>> draws;
    EvalResult eval;
};

PipelineOutcome run_pipeline(const Dataset& train, const Dataset& test,
                             const PipelineSpec& spec);

// least-squares line through (log x, log y); slope ~ the scaling exponent
struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y);

}  // namespace epvi
