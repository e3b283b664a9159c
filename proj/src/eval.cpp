#include "epvi/eval.hpp"

#include <cmath>
#include <filesystem>

#include "epvi/math.hpp"

namespace epvi {

io::json family_config_to_json(const FamilyConfig& config) {
    io::json doc;
    doc["family"] = config.family;
    if (config.family == "gaussian") {
        doc["prior_mean"] = config.gaussian.prior_mean;
        doc["prior_var"] = config.gaussian.prior_var;
        doc["lik_var"] = config.gaussian.lik_var;
    } else if (config.family == "logistic") {
        doc["V"] = config.logistic.V;
        doc["prior_shape"] = config.logistic.prior_shape;
        doc["prior_rate"] = config.logistic.prior_rate;
    } else if (config.family == "tlsa") {
        const auto& t = config.tlsa;
        doc["L"] = t.L;
        doc["C"] = t.C;
        doc["V"] = t.V;
        doc["D"] = t.D;
        doc["rho"] = t.rho;
        doc["sigma_w2"] = t.sigma_w2;
        doc["tau"] = t.tau;
        doc["paper_sign"] = t.paper_sign;
    } else {
        throw std::invalid_argument("unknown model family: " + config.family);
    }
    return doc;
}

FamilyConfig family_config_from_json(const io::json& doc) {
    FamilyConfig config;
    config.family = doc.at("family").get<std::string>();
    if (config.family == "gaussian") {
        config.gaussian.prior_mean = doc.at("prior_mean").get<std::vector<double>>();
        config.gaussian.prior_var = doc.at("prior_var").get<double>();
        config.gaussian.lik_var = doc.at("lik_var").get<double>();
    } else if (config.family == "logistic") {
        config.logistic.V = doc.at("V").get<int>();
        config.logistic.prior_shape = doc.at("prior_shape").get<double>();
        config.logistic.prior_rate = doc.at("prior_rate").get<double>();
    } else if (config.family == "tlsa") {
        auto& t = config.tlsa;
        t.L = doc.at("L").get<int>();
        t.C = doc.at("C").get<int>();
        t.V = doc.at("V").get<int>();
        t.D = doc.at("D").get<int>();
        t.rho = doc.at("rho").get<double>();
        t.sigma_w2 = doc.at("sigma_w2").get<double>();
        t.tau = doc.at("tau").get<double>();
        t.paper_sign = doc.value("paper_sign", false);
    } else {
        throw std::invalid_argument("unknown model family: " + config.family);
    }
    return config;
}

ModelFactory make_model_factory(const FamilyConfig& config) {
    if (config.family == "gaussian") {
        const auto c = config.gaussian;
        return [c](DataShard shard, double beta) -> std::unique_ptr<Model> {
            return std::make_unique<models::GaussianToyModel>(c, std::move(shard), beta);
        };
    }
    if (config.family == "logistic") {
        const auto c = config.logistic;
        return [c](DataShard shard, double beta) -> std::unique_ptr<Model> {
            return std::make_unique<models::LogisticModel>(c, std::move(shard), beta);
        };
    }
    if (config.family == "tlsa") {
        const auto c = config.tlsa;
        return [c](DataShard shard, double beta) -> std::unique_ptr<Model> {
            return std::make_unique<models::TlsaModel>(c, std::move(shard), beta);
        };
    }
    throw std::invalid_argument("unknown model family: " + config.family);
}

io::json eval_result_to_json(const EvalResult& r) {
    io::json doc;
    doc["method"] = r.method;
    doc["nll_per_datum"] = r.nll_per_datum;
    doc["nll_se"] = r.nll_se;
    doc["nll_mc_se"] = r.nll_mc_se;
    if (r.has_accuracy) doc["accuracy"] = r.accuracy;
    doc["test_rows"] = r.test_rows;
    doc["draw_count"] = r.draw_count;
    doc["max_fit_seconds"] = r.max_fit_seconds;
    doc["transfer_seconds"] = r.transfer_seconds;
    doc["combine_seconds"] = r.combine_seconds;
    doc["config"] = r.config_echo;
    return doc;
}

EvalResult heldout_metrics(const std::vector<std::vector<double>>& draws,
                           const Dataset& test, const FamilyConfig& config) {
    if (draws.empty()) throw std::invalid_argument("heldout_metrics: no posterior draws");
    if (test.rows == 0) throw std::invalid_argument("heldout_metrics: empty test split");
    const std::size_t s_count = draws.size();
    const double log_s = std::log(static_cast<double>(s_count));

    std::vector<double> grid;
    if (config.family == "tlsa") grid = models::tlsa_grid(config.tlsa.V, config.tlsa.D);

    EvalResult result;
    result.test_rows = test.rows;
    result.draw_count = s_count;

    std::vector<double> row_ll(test.rows);
    double mc_var_sum = 0.0;
    std::size_t correct = 0;
    std::vector<double> lp(s_count);
    for (std::size_t r = 0; r < test.rows; ++r) {
        for (std::size_t s = 0; s < s_count; ++s) {
            const auto& theta = draws[s];
            if (config.family == "gaussian") {
                lp[s] = log_normal_iso(test.y_row(r), theta, config.gaussian.lik_var);
            } else if (config.family == "logistic") {
                lp[s] = models::logistic_predictive_log_lik(theta, test.x_row(r), test.y[r]);
            } else {
                lp[s] = models::tlsa_predictive_log_lik(config.tlsa, grid, theta,
                                                        test.x_row(r), test.y_row(r));
            }
        }
        const double lse = log_sum_exp(lp);
        row_ll[r] = lse - log_s;

        // delta-method MC variance of log-mean: var(p)/ (S p^2)
        std::vector<double> lp2(s_count);
        for (std::size_t s = 0; s < s_count; ++s) lp2[s] = 2.0 * lp[s];
        const double log_m2 = log_sum_exp(lp2) - log_s;
        const double ratio = std::exp(log_m2 - 2.0 * row_ll[r]);
        mc_var_sum += std::max(0.0, ratio - 1.0) / static_cast<double>(s_count);

        if (config.family == "logistic") {
            double p_mean = 0.0;
            for (const auto& theta : draws)
                p_mean += models::logistic_predictive_prob(theta, test.x_row(r));
            p_mean /= static_cast<double>(s_count);
            if ((p_mean >= 0.5 ? 1.0 : 0.0) == test.y[r]) ++correct;
        }
    }

    const double t = static_cast<double>(test.rows);
    double mean_ll = 0.0;
    for (const double v : row_ll) mean_ll += v;
    mean_ll /= t;
    double var_ll = 0.0;
    for (const double v : row_ll) var_ll += (v - mean_ll) * (v - mean_ll);
    var_ll = test.rows > 1 ? var_ll / (t - 1.0) : 0.0;

    result.nll_per_datum = -mean_ll;
    result.nll_se = std::sqrt(var_ll / t);
    result.nll_mc_se = std::sqrt(mc_var_sum) / t;
    if (config.family == "logistic") {
        result.has_accuracy = true;
        result.accuracy = static_cast<double>(correct) / t;
    }
    return result;
}

SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_loglog: need matching series with >= 2 points");
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        syy += ly * ly;
    }
    SlopeFit fit;
    const double denom = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    const double ss_tot = syy - sy * sy / n;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double pred = fit.intercept + fit.slope * std::log(x[i]);
        ss_res += (std::log(y[i]) - pred) * (std::log(y[i]) - pred);
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

PipelineOutcome run_pipeline(const Dataset& train, const Dataset& test,
                             const PipelineSpec& spec) {
    if (spec.work_dir.empty())
        throw std::invalid_argument("run_pipeline: work_dir is required");
    std::filesystem::create_directories(spec.work_dir);

    PipelineOutcome out;
    out.manifest = partition(train.rows, spec.M, Rng::derive(spec.seed, 0));
    out.manifest.dataset_path = "";
    out.manifest.param_paths.resize(static_cast<std::size_t>(spec.M));
    for (int m = 0; m < spec.M; ++m)
        out.manifest.param_paths[static_cast<std::size_t>(m)] =
            spec.work_dir + "/shard_" + std::to_string(m) + ".mixture.json";

    const auto factory = make_model_factory(spec.model);
    out.ledger = run_parallel_fits(train, out.manifest, factory, spec.fit);

    SamplerConfig sampler = spec.sampler;
    sampler.seed = Rng::derive(spec.seed, 0xC0113C7);
    out.combined = collect_and_combine(out.manifest, spec.method, sampler, spec.cap, out.ledger);

    Rng draw_rng(Rng::derive(spec.seed, 0xD4A35));
    if (spec.method == CombineMethod::exact)
        out.draws = draw_posterior_samples(out.combined.enumeration, spec.posterior_draws,
                                           draw_rng);
    else
        out.draws = draw_posterior_samples(out.combined.samples, spec.posterior_draws, draw_rng);

    out.eval = heldout_metrics(out.draws, test, spec.model);
    out.eval.method = combine_method_name(spec.method);
    out.eval.max_fit_seconds = out.ledger.max_fit_seconds;
    out.eval.transfer_seconds = out.ledger.transfer_seconds;
    out.eval.combine_seconds = out.ledger.combine_seconds;
    out.eval.config_echo = {{"M", spec.M},
                            {"K", spec.fit.K},
                            {"R", spec.sampler.R},
                            {"burn_in", spec.sampler.burn_in},
                            {"S", spec.posterior_draws},
                            {"seed", spec.seed},
                            {"method", combine_method_name(spec.method)},
                            {"family", spec.model.family}};
    if (spec.model.family == "tlsa") out.eval.config_echo["L"] = spec.model.tlsa.L;
    return out;
}

}  // namespace epvi
