#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "epvi/io.hpp"
#include "epvi/pipeline.hpp"

namespace fs = std::filesystem;
using namespace epvi;

namespace {

std::string binary() {
    const char* env = std::getenv("EPVI_BIN");
    REQUIRE_MESSAGE(env != nullptr, "EPVI_BIN must point at the epvi binary");
    return env;
}

int run(const std::string& args, const std::string& capture = "") {
    std::string cmd = binary() + " " + args;
    if (!capture.empty()) cmd += " >" + capture + " 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("epvi_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("help exits zero, usage errors exit two") {
    CHECK(run("--help", "/dev/null") == 0);
    CHECK(run("combine --help", "/dev/null") == 0);
    CHECK(run("no-such-subcommand", "/dev/null") == 2);
    CHECK(run("combine --no-such-flag x", "/dev/null") == 2);
    CHECK(run("gen-data --model not-a-model --out /tmp/x", "/dev/null") == 2);
}

TEST_CASE("combine --method exact propagates the blowup guard") {
    const auto dir = fresh_dir("blowup");
    const int m_count = 10;
    auto manifest = partition(100, m_count, 3);
    Rng rng(5);
    for (int m = 0; m < m_count; ++m) {
        std::vector<GaussianComponent> comps;
        for (int i = 0; i < 4; ++i) comps.push_back(GaussianComponent{{rng.normal()}, 1.0});
        const auto path = (dir / ("shard_" + std::to_string(m) + ".mixture.json")).string();
        io::write_mixture(path, MixtureApprox(1, std::move(comps)), io::MixtureMeta{m, m_count, 0.1});
        manifest.param_paths.push_back(path);
    }
    io::write_json((dir / "manifest.json").string(), manifest_to_json(manifest));

    const auto log = dir / "combine.log";
    const int code = run("combine --manifest " + (dir / "manifest.json").string() +
                             " --method exact --out " + (dir / "out").string(),
                         log.string());
    CHECK(code == 1);
    CHECK(slurp(log).find("blowup") != std::string::npos);

    // a raised cap lets the same configuration through
    const int ok = run("combine --manifest " + (dir / "manifest.json").string() +
                           " --method exact --cap 2000000 --S 50 --out " +
                           (dir / "out2").string(),
                       (dir / "combine2.log").string());
    CHECK(ok == 0);
}

TEST_CASE("evaluate without a combine artifact reports missing input") {
    const auto dir = fresh_dir("missing_eval");
    io::write_json((dir / "config.json").string(), {{"family", "gaussian"},
                                                    {"prior_mean", {0.0}},
                                                    {"prior_var", 1.0},
                                                    {"lik_var", 1.0}});
    Dataset test;
    test.family = "gaussian";
    test.rows = 1;
    test.outputs = 1;
    test.y = {0.5};
    io::write_dataset((dir / "test.txt").string(), test);

    const auto log = dir / "eval.log";
    const int code = run("evaluate --draws " + (dir / "draws.txt").string() + " --test " +
                             (dir / "test.txt").string() + " --config " +
                             (dir / "config.json").string() + " --out " +
                             (dir / "eval.json").string(),
                         log.string());
    CHECK(code == 1);
    CHECK(slurp(log).find("missing") != std::string::npos);
}

TEST_CASE("scripted toy pipeline runs clean end to end") {
    const auto dir = fresh_dir("smoke");
    const std::string d = dir.string();
    CHECK(run("gen-data --model gaussian --N 200 --dim 2 --seed 3 --holdout 0.1 --out " + d,
              d + "/log1") == 0);
    CHECK(run("fit-all --data " + d + "/train.txt --config " + d + "/config.json" +
                  " --M 4 --K 2 --max-iters 400 --seed 5 --out " + d + "/run",
              d + "/log2") == 0);
    CHECK(run("combine --manifest " + d + "/run/manifest.json --method sample --R 300" +
                  " --burn-in 200 --S 400 --seed 7 --out " + d + "/combine",
              d + "/log3") == 0);
    CHECK(run("evaluate --draws " + d + "/combine/draws.txt --test " + d + "/test.txt" +
                  " --config " + d + "/config.json --method sample --out " + d + "/eval.json",
              d + "/log4") == 0);

    REQUIRE(fs::exists(dir / "eval.json"));
    const auto eval = io::read_json((dir / "eval.json").string());
    CHECK(eval.at("nll_per_datum").get<double>() > 0.0);
    CHECK(eval.at("method").get<std::string>() == "sample");

    // ledger accounting carried through the combine step: M * K * (d+2)
    const auto ledger = io::read_json((dir / "combine" / "ledger.json").string());
    CHECK(ledger.at("transfer_scalars").get<std::size_t>() == 4 * 2 * (2 + 2));
    CHECK(ledger.at("max_fit_seconds").get<double>() > 0.0);

    // single-shard refit through the manifest reproduces the worker's file
    CHECK(run("fit --data " + d + "/train.txt --config " + d + "/config.json" +
                  " --manifest " + d + "/run/manifest.json --shard 2 --K 2 --max-iters 400" +
                  " --out " + d + "/refit.json",
              d + "/log5") == 0);
    CHECK(slurp(dir / "refit.json") == slurp(dir / "run" / "shard_2.mixture.json"));
}

TEST_CASE("gen-data subsamples an external labeled csv") {
    const auto dir = fresh_dir("csv");
    {
        std::ofstream csv(dir / "susy_like.csv");
        Rng rng(3);
        for (int i = 0; i < 50; ++i) {
            csv << (i % 2) << "," << rng.normal() << "," << rng.normal() << ","
                << rng.normal() << "\n";
        }
    }
    const std::string d = dir.string();
    CHECK(run("gen-data --model logistic --from-csv " + d + "/susy_like.csv --max-rows 40" +
                  " --holdout 0.1 --seed 5 --out " + d,
              d + "/log") == 0);
    const auto train = io::read_dataset(d + "/train.txt");
    const auto test = io::read_dataset(d + "/test.txt");
    CHECK(train.rows == 36);
    CHECK(test.rows == 4);
    CHECK(train.features == 3);
    const auto config = io::read_json(d + "/config.json");
    CHECK(config.at("V").get<int>() == 3);
}

TEST_CASE("compare sweeps an axis and records every cell") {
    const auto dir = fresh_dir("compare");
    const std::string d = dir.string();
    CHECK(run("gen-data --model gaussian --N 150 --dim 1 --seed 11 --out " + d,
              d + "/log1") == 0);
    CHECK(run("compare --data " + d + "/train.txt --test " + d + "/test.txt --config " + d +
                  "/config.json --methods exact,sample --nvi --axis M --values 2,3" +
                  " --K 1 --R 150 --burn-in 100 --S 150 --max-iters 300 --seed 13 --out " + d +
                  "/cmp",
              d + "/log2") == 0);

    const auto table = slurp(dir / "cmp" / "results.txt");
    // header + 3 methods x 2 axis values
    CHECK(std::count(table.begin(), table.end(), '\n') == 2 + 6);
    CHECK(table.find("nvi M 2") != std::string::npos);
    CHECK(table.find("exact M 3") != std::string::npos);
    CHECK(table.find(" ok\n") != std::string::npos);
    CHECK(fs::exists(dir / "cmp" / "eval_sample_M2.json"));
    CHECK(fs::exists(dir / "cmp" / "eval_exact_M3.json"));
}
