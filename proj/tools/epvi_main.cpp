// epvi: embarrassingly parallel variational inference pipeline driver.
//
// Subcommands: gen-data, fit, fit-all, combine, evaluate, bench, compare.
// All randomness flows through --seed; reruns with identical flags reproduce
// every artifact byte for byte (timing fields aside).

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "epvi/eval.hpp"
#include "epvi/kernels.hpp"
#include "epvi/models/synthetic.hpp"

namespace fs = std::filesystem;
using namespace epvi;

namespace {

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

std::string path_join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

// ---------------------------------------------------------------- gen-data

struct GenDataArgs {
    std::string model;
    std::string out;
    std::size_t n = 1000;
    double holdout = 0.1;
    std::uint64_t seed = 0;
    std::string from_csv;
    std::size_t max_rows = 0;
    // logistic coefficient count / tlsa output dimensions
    int v = -1;
    double prior_shape = 1.0;
    double prior_rate = 1.0;
    // tlsa
    models::TlsaModelConfig tlsa;
    // gaussian
    int dim = 1;
    double prior_mean = 0.0;
    double prior_var = 1.0;
    double lik_var = 1.0;
};

int run_gen_data(const GenDataArgs& args) {
    ensure_dir(args.out);
    FamilyConfig family;
    family.family = args.model;
    io::json truth;
    Dataset train;
    Dataset test;

    if (!args.from_csv.empty()) {
        // subsample an external labeled CSV instead of generating
        if (args.model != "logistic")
            throw std::runtime_error("gen-data: --from-csv supports the logistic family only");
        const auto all = io::read_labeled_csv(args.from_csv, args.max_rows);
        family.logistic =
            models::LogisticModelConfig{all.features, args.prior_shape, args.prior_rate};
        const auto perm = partition_permutation(all.rows, args.seed);
        const auto n_test =
            static_cast<std::size_t>(std::llround(args.holdout * static_cast<double>(all.rows)));
        const std::span<const std::size_t> train_idx(perm.data(), all.rows - n_test);
        const std::span<const std::size_t> test_idx(perm.data() + all.rows - n_test, n_test);
        train = all.select(train_idx);
        test = all.select(test_idx);
        truth["source_csv"] = args.from_csv;
    } else if (args.model == "logistic") {
        family.logistic = models::LogisticModelConfig{args.v > 0 ? args.v : 10,
                                                      args.prior_shape, args.prior_rate};
        auto gen = models::generate_logistic(family.logistic, args.n, args.holdout, args.seed);
        truth["alpha"] = gen.true_alpha;
        truth["w"] = gen.true_w;
        train = std::move(gen.train);
        test = std::move(gen.test);
    } else if (args.model == "tlsa") {
        family.tlsa = args.tlsa;
        if (args.v > 0) family.tlsa.V = args.v;
        auto gen = models::generate_tlsa(family.tlsa, args.n, args.holdout, args.seed);
        truth["w"] = gen.true_w;
        truth["lambda"] = gen.true_lambda;
        truth["rbar"] = gen.true_rbar;
        train = std::move(gen.train);
        test = std::move(gen.test);
    } else {
        family.gaussian = models::GaussianToyConfig{
            std::vector<double>(static_cast<std::size_t>(args.dim), args.prior_mean),
            args.prior_var, args.lik_var};
        auto gen = models::generate_gaussian(family.gaussian, args.n, args.holdout, args.seed);
        truth["theta"] = gen.true_theta;
        train = std::move(gen.train);
        test = std::move(gen.test);
    }

    io::write_dataset(path_join(args.out, "train.txt"), train);
    io::write_dataset(path_join(args.out, "test.txt"), test);
    io::write_json(path_join(args.out, "config.json"), family_config_to_json(family));
    truth["seed"] = args.seed;
    io::write_json(path_join(args.out, "truth.json"), truth);
    std::cout << "wrote " << train.rows << " train rows, " << test.rows << " test rows to "
              << args.out << "\n";
    return 0;
}

// --------------------------------------------------------------------- fit

struct FitArgs {
    std::string data;
    std::string config;
    std::string manifest;
    std::string out;
    int shard = -1;
    int k = 4;
    int max_iters = 5000;
    double rel_tol = 1e-6;
    std::uint64_t seed = 0;
    bool trace = false;
};

int run_fit(const FitArgs& args) {
    const auto family = family_config_from_json(io::read_json(args.config));
    const auto train = io::read_dataset(args.data);
    const auto factory = make_model_factory(family);

    FitConfig fit_config;
    fit_config.K = args.k;
    fit_config.max_iters = args.max_iters;
    fit_config.rel_tol = args.rel_tol;
    fit_config.record_trace = args.trace;

    DataShard shard;
    double beta = 1.0;
    std::uint64_t seed = args.seed;
    io::MixtureMeta meta{0, 1, 1.0};
    if (!args.manifest.empty()) {
        if (args.shard < 0)
            throw std::runtime_error("fit: --shard is required together with --manifest");
        const auto manifest = manifest_from_json(io::read_json(args.manifest));
        shard = shard_view(train, manifest, args.shard);
        beta = manifest.prior_temper;
        seed = manifest.fit_seeds[static_cast<std::size_t>(args.shard)];
        meta = {args.shard, manifest.M, manifest.prior_temper};
    } else {
        shard = DataShard{0, train};
    }

    const std::size_t rows = shard.rows();
    const auto model = factory(std::move(shard), beta);
    Rng rng(seed);
    auto [mixture, report] = fit(*model, fit_config, rng);
    report.shard_id = meta.shard_id;
    report.rows = rows;

    io::write_mixture(args.out, mixture, meta);
    io::json report_doc{{"shard_id", report.shard_id},
                        {"rows", report.rows},
                        {"objective", report.objective},
                        {"iterations", report.iterations},
                        {"converged", report.converged},
                        {"seconds", report.seconds}};
    if (args.trace) report_doc["trace"] = report.trace;
    io::write_json(args.out + ".report.json", report_doc);
    std::cout << "fit: objective " << report.objective << " in " << report.iterations
              << " iterations (" << (report.converged ? "converged" : "budget reached") << ")\n";
    return 0;
}

// ----------------------------------------------------------------- fit-all

struct FitAllArgs {
    std::string data;
    std::string config;
    std::string out;
    int m = 5;
    int k = 4;
    int max_iters = 5000;
    double rel_tol = 1e-6;
    std::uint64_t seed = 0;
};

int run_fit_all(const FitAllArgs& args) {
    ensure_dir(args.out);
    const auto family = family_config_from_json(io::read_json(args.config));
    const auto train = io::read_dataset(args.data);

    auto manifest = partition(train.rows, args.m, Rng::derive(args.seed, 0));
    manifest.dataset_path = args.data;
    for (int m = 0; m < args.m; ++m)
        manifest.param_paths.push_back(
            path_join(args.out, "shard_" + std::to_string(m) + ".mixture.json"));

    FitConfig fit_config;
    fit_config.K = args.k;
    fit_config.max_iters = args.max_iters;
    fit_config.rel_tol = args.rel_tol;

    const auto ledger = run_parallel_fits(train, manifest, make_model_factory(family), fit_config);
    io::write_json(path_join(args.out, "manifest.json"), manifest_to_json(manifest));
    io::write_json(path_join(args.out, "ledger.json"), ledger_to_json(ledger));
    std::cout << "fit " << args.m << " shards in parallel; max fit time "
              << ledger.max_fit_seconds << " s\n";
    return 0;
}

// ----------------------------------------------------------------- combine

struct CombineArgs {
    std::string manifest;
    std::string out;
    std::string method = "sample";
    int r = 500;
    int burn_in = 1000;
    std::uint64_t cap = kDefaultEnumerationCap;
    std::size_t s = 1000;
    std::uint64_t seed = 0;
    bool parallel_rounds = false;
};

int run_combine(const CombineArgs& args) {
    ensure_dir(args.out);
    const auto manifest = manifest_from_json(io::read_json(args.manifest));
    const auto method = parse_combine_method(args.method);

    RunLedger ledger;
    const auto ledger_path = (fs::path(args.manifest).parent_path() / "ledger.json").string();
    if (fs::exists(ledger_path)) ledger = ledger_from_json(io::read_json(ledger_path));
    ledger.transfer_scalars = 0;
    ledger.transfer_bytes = 0;

    SamplerConfig sampler;
    sampler.R = args.r;
    sampler.burn_in = args.burn_in;
    sampler.seed = Rng::derive(args.seed, 0xC0113C7);
    sampler.parallel_pairwise_rounds = args.parallel_rounds;

    const auto result = collect_and_combine(manifest, method, sampler, args.cap, ledger);

    Rng draw_rng(Rng::derive(args.seed, 0xD4A35));
    std::vector<std::vector<double>> draws;
    if (method == CombineMethod::exact) {
        io::write_enumeration(path_join(args.out, "components.txt"), result.enumeration,
                              result.dim);
        draws = draw_posterior_samples(result.enumeration, args.s, draw_rng);
    } else {
        io::write_component_samples(path_join(args.out, "components.txt"), result.samples);
        if (!result.samples.provenance.warning.empty())
            std::cerr << "warning: " << result.samples.provenance.warning << "\n";
        draws = draw_posterior_samples(result.samples, args.s, draw_rng);
    }
    io::write_draws(path_join(args.out, "draws.txt"), draws, args.method, args.seed);
    io::write_json(path_join(args.out, "ledger.json"), ledger_to_json(ledger));
    std::cout << "combined " << manifest.M << " subposteriors via '" << args.method << "': "
              << ledger.transfer_scalars << " scalars transferred, combine time "
              << ledger.combine_seconds << " s\n";
    return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
    std::string draws;
    std::string test;
    std::string config;
    std::string out;
    std::string method = "";
};

int run_evaluate(const EvaluateArgs& args) {
    if (!fs::exists(args.draws))
        throw std::runtime_error("evaluate: missing combine artifact: " + args.draws);
    const auto family = family_config_from_json(io::read_json(args.config));
    const auto test = io::read_dataset(args.test);
    const auto draws = io::read_draws(args.draws);

    auto result = heldout_metrics(draws, test, family);
    result.method = args.method;
    io::write_json(args.out, eval_result_to_json(result));
    std::cout << "held-out NLL/datum " << result.nll_per_datum << " (se " << result.nll_se << ")";
    if (result.has_accuracy) std::cout << ", accuracy " << result.accuracy;
    std::cout << "\n";
    return 0;
}

// ------------------------------------------------------------------- bench

struct BenchArgs {
    std::string out;
    bool quick = false;
    std::uint64_t seed = 0;
};

std::vector<MixtureApprox> bench_mixtures(Rng& rng, int m_count, int k, int dim) {
    std::vector<MixtureApprox> mixtures;
    for (int m = 0; m < m_count; ++m) {
        std::vector<GaussianComponent> comps;
        for (int i = 0; i < k; ++i) {
            GaussianComponent c;
            c.mean.resize(static_cast<std::size_t>(dim));
            for (auto& x : c.mean) x = rng.normal();
            c.variance = 0.5 + rng.uniform();
            comps.push_back(std::move(c));
        }
        mixtures.emplace_back(dim, std::move(comps));
    }
    return mixtures;
}

double best_probe_seconds(const std::vector<MixtureApprox>& mixtures, int r,
                          std::uint64_t seed, int reps) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        SamplerConfig config;
        config.R = r;
        config.burn_in = 0;
        config.seed = seed;
        best = std::min(best, step_cost_probe(mixtures, config).seconds);
    }
    return best;
}

int run_bench(const BenchArgs& args) {
    ensure_dir(args.out);
    Rng rng(args.seed + 7);
    const int reps = args.quick ? 2 : 3;
    std::ofstream table(path_join(args.out, "sampler_scaling.txt"));
    table << "# epvi-bench sampler wall time (seconds), kernels backend="
          << kernels::backend_name() << "\n";
    table << "# columns: axis value seconds\n";

    const int base_r = args.quick ? 20000 : 40000;

    std::vector<double> xs, ys;
    for (const int r : {base_r, 2 * base_r, 4 * base_r, 8 * base_r}) {
        const auto mixtures = bench_mixtures(rng, 8, 3, 32);
        const double t = best_probe_seconds(mixtures, r, 11, reps);
        table << "R " << r << " " << io::format_double(t) << "\n";
        xs.push_back(r);
        ys.push_back(t);
    }
    const auto r_fit = fit_loglog(xs, ys);
    std::cout << "R scaling: slope " << r_fit.slope << " (R^2 " << r_fit.r2 << ")\n";

    xs.clear();
    ys.clear();
    for (const int m : {4, 8, 16, 32}) {
        const auto mixtures = bench_mixtures(rng, m, 3, 32);
        const double t = best_probe_seconds(mixtures, 2 * base_r, 13, reps);
        table << "M " << m << " " << io::format_double(t) << "\n";
        xs.push_back(m);
        ys.push_back(t);
    }
    const auto m_fit = fit_loglog(xs, ys);
    std::cout << "M scaling: slope " << m_fit.slope << " (R^2 " << m_fit.r2 << ")\n";

    xs.clear();
    ys.clear();
    for (const int d : {64, 128, 256, 512}) {
        const auto mixtures = bench_mixtures(rng, 8, 3, d);
        const double t = best_probe_seconds(mixtures, 2 * base_r, 17, reps);
        table << "d " << d << " " << io::format_double(t) << "\n";
        xs.push_back(d);
        ys.push_back(t);
    }
    const auto d_fit = fit_loglog(xs, ys);
    std::cout << "d scaling: slope " << d_fit.slope << " (R^2 " << d_fit.r2 << ")\n";

    // exact enumeration: K^M growth and the cap guard
    std::ofstream etable(path_join(args.out, "enumeration_scaling.txt"));
    etable << "# columns: M K components seconds\n";
    for (const int m : {7, 8, 9, 10, 11}) {
        const auto mixtures = bench_mixtures(rng, m, 3, 4);
        const auto t0 = std::chrono::steady_clock::now();
        const auto comps = enumerate_product(mixtures);
        const double t =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        etable << m << " 3 " << comps.size() << " " << io::format_double(t) << "\n";
        std::cout << "enumerate K=3 M=" << m << ": " << comps.size() << " components, " << t
                  << " s\n";
    }
    try {
        const auto mixtures = bench_mixtures(rng, 10, 4, 4);
        enumerate_product(mixtures);
        std::cerr << "error: K=4, M=10 enumeration unexpectedly succeeded\n";
        return 1;
    } catch (const EnumerationBlowupError& e) {
        std::cout << "enumerate K=4 M=10: refused (" << e.what() << ")\n";
        etable << "# K=4 M=10 refused above cap " << e.cap << "\n";
    }

    io::json summary{{"r_slope", r_fit.slope},     {"r_r2", r_fit.r2},
                     {"m_slope", m_fit.slope},     {"m_r2", m_fit.r2},
                     {"d_slope", d_fit.slope},     {"d_r2", d_fit.r2},
                     {"kernel_backend", std::string(kernels::backend_name())}};
    io::write_json(path_join(args.out, "bench_summary.json"), summary);
    return 0;
}

// ----------------------------------------------------------------- compare

struct CompareArgs {
    std::string data;
    std::string test;
    std::string config;
    std::string out;
    std::vector<std::string> methods{"exact", "sample", "pairwise"};
    bool include_nvi = false;
    int m = 5;
    int k = 4;
    int r = 500;
    int burn_in = 1000;
    std::uint64_t cap = kDefaultEnumerationCap;
    std::size_t s = 1000;
    int max_iters = 5000;
    double rel_tol = 1e-6;
    std::uint64_t seed = 0;
    std::string axis;  // "", "M", "K", or "L"
    std::vector<int> values;
};

int run_compare(const CompareArgs& args) {
    ensure_dir(args.out);
    const auto family = family_config_from_json(io::read_json(args.config));
    const auto train = io::read_dataset(args.data);
    const auto test = io::read_dataset(args.test);

    std::ofstream table(path_join(args.out, "results.txt"));
    table << "# epvi-compare family=" << family.family << " seed=" << args.seed << "\n";
    table << "# columns: method axis value M K R nll_per_datum nll_se accuracy "
             "max_fit_s transfer_s combine_s total_s status\n";

    std::vector<int> values = args.values;
    if (args.axis.empty()) values = {0};

    for (const int value : values) {
        PipelineSpec spec;
        spec.model = family;
        spec.M = args.m;
        spec.fit.K = args.k;
        spec.fit.max_iters = args.max_iters;
        spec.fit.rel_tol = args.rel_tol;
        spec.sampler.R = args.r;
        spec.sampler.burn_in = args.burn_in;
        spec.cap = args.cap;
        spec.posterior_draws = args.s;
        spec.seed = Rng::derive(args.seed, static_cast<std::uint64_t>(value) + 1);

        if (args.axis == "M") spec.M = value;
        if (args.axis == "K") spec.fit.K = value;
        if (args.axis == "L") {
            if (family.family != "tlsa")
                throw std::runtime_error("compare: --axis L applies to the tlsa family only");
            spec.model.tlsa.L = value;
        }

        std::vector<std::string> methods = args.methods;
        if (args.include_nvi) methods.insert(methods.begin(), "nvi");

        for (const auto& method : methods) {
            const std::string tag =
                method + (args.axis.empty() ? "" : "_" + args.axis + std::to_string(value));
            PipelineSpec cell = spec;
            cell.work_dir = path_join(args.out, "work_" + tag);
            std::string status = "ok";
            EvalResult eval;
            try {
                if (method == "nvi") {
                    cell.M = 1;
                    cell.method = CombineMethod::sample;
                } else {
                    cell.method = parse_combine_method(method);
                }
                const auto outcome = run_pipeline(train, test, cell);
                eval = outcome.eval;
                eval.method = method;
                io::write_json(path_join(args.out, "eval_" + tag + ".json"),
                               eval_result_to_json(eval));
            } catch (const EnumerationBlowupError& e) {
                status = "skipped_blowup";
                std::cerr << "cell " << tag << " skipped: " << e.what() << "\n";
            } catch (const std::exception& e) {
                status = "failed";
                std::cerr << "cell " << tag << " failed: " << e.what() << "\n";
            }

            table << method << " " << (args.axis.empty() ? "-" : args.axis) << " " << value
                  << " " << cell.M << " " << cell.fit.K << " " << cell.sampler.R << " ";
            if (status == "ok") {
                table << io::format_double(eval.nll_per_datum) << " "
                      << io::format_double(eval.nll_se) << " "
                      << (eval.has_accuracy ? io::format_double(eval.accuracy) : "-") << " "
                      << io::format_double(eval.max_fit_seconds) << " "
                      << io::format_double(eval.transfer_seconds) << " "
                      << io::format_double(eval.combine_seconds) << " "
                      << io::format_double(eval.max_fit_seconds + eval.transfer_seconds +
                                           eval.combine_seconds);
            } else {
                table << "- - - - - - -";
            }
            table << " " << status << "\n";

            if (status == "ok") {
                std::cout << tag << ": NLL/datum " << eval.nll_per_datum;
                if (eval.has_accuracy) std::cout << ", accuracy " << eval.accuracy;
                std::cout << ", total "
                          << (eval.max_fit_seconds + eval.transfer_seconds + eval.combine_seconds)
                          << " s\n";
            }
        }
    }
    std::cout << "results table: " << path_join(args.out, "results.txt") << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"embarrassingly parallel variational inference for nonconjugate models"};
    app.require_subcommand(1);

    GenDataArgs gen_args;
    auto* gen = app.add_subcommand("gen-data", "generate a synthetic dataset with holdout split");
    gen->add_option("--model", gen_args.model, "model family")
        ->required()
        ->check(CLI::IsMember({"gaussian", "logistic", "tlsa"}));
    gen->add_option("--N", gen_args.n, "observation count");
    gen->add_option("--holdout", gen_args.holdout, "held-out fraction (default 0.1)");
    gen->add_option("--seed", gen_args.seed, "rng seed");
    gen->add_option("--out", gen_args.out, "output directory")->required();
    gen->add_option("--from-csv", gen_args.from_csv,
                    "subsample a labeled CSV (label, features...) instead of generating");
    gen->add_option("--max-rows", gen_args.max_rows, "CSV subsample row limit (0 = all)");
    gen->add_option("--V", gen_args.v, "coefficient count (logistic) / output dims (tlsa)");
    gen->add_option("--a", gen_args.prior_shape, "Gamma prior shape (logistic)");
    gen->add_option("--b", gen_args.prior_rate, "Gamma prior rate (logistic)");
    gen->add_option("--L", gen_args.tlsa.L, "latent sources (tlsa)");
    gen->add_option("--C", gen_args.tlsa.C, "covariates (tlsa)");
    gen->add_option("--D", gen_args.tlsa.D, "spatial dims (tlsa)");
    gen->add_option("--tau", gen_args.tlsa.tau, "observation precision (tlsa)");
    gen->add_option("--sigma-w2", gen_args.tlsa.sigma_w2, "weight prior variance (tlsa)");
    gen->add_option("--rho", gen_args.tlsa.rho, "Exponential rate on lambda (tlsa)");
    gen->add_flag("--paper-sign", gen_args.tlsa.paper_sign,
                  "use the positive basis exponent (tlsa)");
    gen->add_option("--dim", gen_args.dim, "theta dimension (gaussian)");
    gen->add_option("--prior-mean", gen_args.prior_mean, "prior mean (gaussian)");
    gen->add_option("--prior-var", gen_args.prior_var, "prior variance (gaussian)");
    gen->add_option("--lik-var", gen_args.lik_var, "likelihood variance (gaussian)");

    FitArgs fit_args;
    auto* fit_cmd = app.add_subcommand("fit", "fit one subposterior (or the full data)");
    fit_cmd->add_option("--data", fit_args.data, "training dataset")->required();
    fit_cmd->add_option("--config", fit_args.config, "model config json")->required();
    fit_cmd->add_option("--manifest", fit_args.manifest, "shard manifest (fit one shard)");
    fit_cmd->add_option("--shard", fit_args.shard, "shard id within the manifest");
    fit_cmd->add_option("--K", fit_args.k, "mixture components");
    fit_cmd->add_option("--max-iters", fit_args.max_iters, "iteration budget");
    fit_cmd->add_option("--rel-tol", fit_args.rel_tol, "convergence threshold");
    fit_cmd->add_option("--seed", fit_args.seed, "rng seed (full-data fits)");
    fit_cmd->add_flag("--trace", fit_args.trace, "record the objective trace");
    fit_cmd->add_option("--out", fit_args.out, "output mixture file")->required();

    FitAllArgs fit_all_args;
    auto* fit_all =
        app.add_subcommand("fit-all", "partition the data and fit all shards in parallel");
    fit_all->add_option("--data", fit_all_args.data, "training dataset")->required();
    fit_all->add_option("--config", fit_all_args.config, "model config json")->required();
    fit_all->add_option("--M", fit_all_args.m, "shard count");
    fit_all->add_option("--K", fit_all_args.k, "mixture components");
    fit_all->add_option("--max-iters", fit_all_args.max_iters, "iteration budget");
    fit_all->add_option("--rel-tol", fit_all_args.rel_tol, "convergence threshold");
    fit_all->add_option("--seed", fit_all_args.seed, "master seed");
    fit_all->add_option("--out", fit_all_args.out, "output directory")->required();

    CombineArgs combine_args;
    auto* combine =
        app.add_subcommand("combine", "collect shard parameters and form the product");
    combine->add_option("--manifest", combine_args.manifest, "manifest json")->required();
    combine->add_option("--method", combine_args.method, "exact | sample | pairwise")
        ->check(CLI::IsMember({"exact", "sample", "pairwise"}));
    combine->add_option("--R", combine_args.r, "retained component samples");
    combine->add_option("--burn-in", combine_args.burn_in, "chain burn-in steps");
    combine->add_option("--cap", combine_args.cap, "exact enumeration cap");
    combine->add_option("--S", combine_args.s, "posterior draws to emit");
    combine->add_option("--seed", combine_args.seed, "rng seed");
    combine->add_flag("--parallel-rounds", combine_args.parallel_rounds,
                      "fan pairwise rounds out to concurrent workers");
    combine->add_option("--out", combine_args.out, "output directory")->required();

    EvaluateArgs eval_args;
    auto* evaluate = app.add_subcommand("evaluate", "held-out metrics from posterior draws");
    evaluate->add_option("--draws", eval_args.draws, "draws file from combine")->required();
    evaluate->add_option("--test", eval_args.test, "held-out dataset")->required();
    evaluate->add_option("--config", eval_args.config, "model config json")->required();
    evaluate->add_option("--method", eval_args.method, "method tag recorded in the result");
    evaluate->add_option("--out", eval_args.out, "output eval json")->required();

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "sampler and enumeration scaling benchmarks");
    bench->add_option("--out", bench_args.out, "output directory")->required();
    bench->add_option("--seed", bench_args.seed, "rng seed");
    bench->add_flag("--quick", bench_args.quick, "smaller grids");

    CompareArgs compare_args;
    auto* compare = app.add_subcommand("compare", "run and compare combination methods");
    compare->add_option("--data", compare_args.data, "training dataset")->required();
    compare->add_option("--test", compare_args.test, "held-out dataset")->required();
    compare->add_option("--config", compare_args.config, "model config json")->required();
    compare->add_option("--methods", compare_args.methods, "methods to run")->delimiter(',');
    compare->add_flag("--nvi", compare_args.include_nvi, "include a full-data NVI reference");
    compare->add_option("--M", compare_args.m, "shard count");
    compare->add_option("--K", compare_args.k, "mixture components");
    compare->add_option("--R", compare_args.r, "retained component samples");
    compare->add_option("--burn-in", compare_args.burn_in, "chain burn-in steps");
    compare->add_option("--cap", compare_args.cap, "exact enumeration cap");
    compare->add_option("--S", compare_args.s, "posterior draws for evaluation");
    compare->add_option("--max-iters", compare_args.max_iters, "fit iteration budget");
    compare->add_option("--rel-tol", compare_args.rel_tol, "fit convergence threshold");
    compare->add_option("--seed", compare_args.seed, "master seed");
    compare->add_option("--axis", compare_args.axis, "sweep axis")
        ->check(CLI::IsMember({"M", "K", "L"}));
    compare->add_option("--values", compare_args.values, "sweep values")->delimiter(',');
    compare->add_option("--out", compare_args.out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage problems exit 2, --help exits 0
    }

    try {
        if (gen->parsed()) return run_gen_data(gen_args);
        if (fit_cmd->parsed()) return run_fit(fit_args);
        if (fit_all->parsed()) return run_fit_all(fit_all_args);
        if (combine->parsed()) return run_combine(combine_args);
        if (evaluate->parsed()) return run_evaluate(eval_args);
        if (bench->parsed()) return run_bench(bench_args);
        if (compare->parsed()) return run_compare(compare_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
