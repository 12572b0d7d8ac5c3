#include "support.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "swapfit/cli.hpp"
#include "swapfit/report.hpp"

using namespace swapfit;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "swapfit");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(int(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string data_file(const char* name) { return (testing::source_dir() / "data" / name).string(); }

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

// Rows of a small CSV as a vector of fields.
std::vector<std::vector<std::string>> csv_rows(const std::filesystem::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        rows.push_back(f);
    }
    return rows;
}

const char* kScenario = R"({
  "model": {"family": "linear", "coefficients": [2.0, 1.0]},
  "sigma0_sq": 0.04, "sigma1_sq": 0.0, "seed": 7,
  "n": 120, "rate_x": 0.5, "rate_y": 0.2
})";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("fit with a model subset writes only that model") {
    testing::TempDir dir("cli_fit");
    Run r = cli({"fit", "--x-file", data_file("gdp.csv"), "--y-file", data_file("debt.csv"), "--models", "slr",
                 "--out-dir", dir.path().string()});
    REQUIRE(r.code == kExitOk);
    CHECK(std::filesystem::exists(dir.path() / "fit_slr.json"));
    CHECK(!std::filesystem::exists(dir.path() / "fit_qr.json"));
    CHECK(!std::filesystem::exists(dir.path() / "fit_gmm-linear.json"));
    auto rows = csv_rows(dir.path() / "comparison.csv");
    CHECK(rows.size() == 2);
    CHECK(rows[1][0] == "slr");
    Json manifest = Json::parse(slurp(dir.path() / "manifest.json"));
    CHECK(manifest["command"] == "fit");
    CHECK(manifest["inputs"].size() == 2);
    CHECK(inputs_match(manifest_from_json(manifest)));
}

TEST_CASE("input errors exit with code 2") {
    testing::TempDir dir("cli_err");
    CHECK(cli({"fit", "--x-file", (dir.path() / "nope.csv").string(), "--y-file", data_file("debt.csv"),
               "--out-dir", dir.path().string()})
              .code == kExitInputError);
    CHECK(cli({"fit", "--x-file", data_file("gdp.csv"), "--y-file", data_file("debt.csv"), "--models", "cubic",
               "--out-dir", dir.path().string()})
              .code == kExitInputError);
    CHECK(cli({"timeline", "--out-dir", dir.path().string()}).code == kExitInputError);
    Run gof = cli({"gof", "--out-dir", dir.path().string(), "--models", "gmm-linear"});
    CHECK(gof.code == kExitInputError);
    CHECK(gof.err.find("MissingFit") != std::string::npos);
    CHECK(cli({"--bogus-flag"}).code == kExitInputError);
}

TEST_CASE("synth is deterministic for a fixed seed") {
    testing::TempDir a("cli_synth_a"), b("cli_synth_b");
    const auto scen = a.file("scenario.json", kScenario);
    REQUIRE(cli({"synth", "--scenario", scen.string(), "--out-dir", a.path().string()}).code == kExitOk);
    // A missing output directory is created.
    const auto nested = b.path() / "nested" / "out";
    REQUIRE(cli({"synth", "--scenario", scen.string(), "--out-dir", nested.string()}).code == kExitOk);
    for (const char* f : {"synth_x.csv", "synth_y.csv", "truth.json"}) {
        CHECK(sha256_file(a.path() / f) == sha256_file(nested / f));
    }
}

TEST_CASE("a fit of a noiseless-forward synthetic pair recovers z") {
    testing::TempDir dir("cli_truth");
    const auto scen = dir.file("scenario.json", kScenario);
    REQUIRE(cli({"synth", "--scenario", scen.string(), "--out-dir", dir.path().string()}).code == kExitOk);
    Run r = cli({"fit", "--x-file", (dir.path() / "synth_x.csv").string(), "--y-file",
                 (dir.path() / "synth_y.csv").string(), "--scale", "1", "--models", "gmm-linear", "--truth",
                 (dir.path() / "truth.json").string(), "--out-dir", dir.path().string()});
    REQUIRE(r.code == kExitOk);
    auto rows = csv_rows(dir.path() / "comparison.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][7] == "z_accuracy");
    CHECK(std::stod(rows[1][7]) == 1.0);
}

TEST_CASE("precheck on independent noise exits 1") {
    testing::TempDir dir("cli_pre");
    std::ostringstream xs, ys;
    xs << "DATE,X\n";
    ys << "DATE,Y\n";
    std::mt19937_64 rng(12);
    std::exponential_distribution<double> e(1.0);
    for (int i = 0; i < 160; ++i) {
        const QuarterIndex q = QuarterIndex::from_ordinal(1980 * 4 + i);
        xs << q.iso_date() << ',' << e(rng) << '\n';
        ys << q.iso_date() << ',' << e(rng) << '\n';
    }
    const auto x = dir.file("x.csv", xs.str());
    const auto y = dir.file("y.csv", ys.str());
    Run r = cli({"precheck", "--x-file", x.string(), "--y-file", y.string(), "--scale", "1", "--out-dir",
                 dir.path().string()});
    INFO(r.err);
    CHECK(r.code == kExitNotBidirectional);
    Json pre = Json::parse(slurp(dir.path() / "precheck.json"));
    CHECK(pre["causality"]["bidirectional"] == false);
    CHECK(std::filesystem::exists(dir.path() / "granger.txt"));
}

TEST_CASE("bundled precheck is bidirectional") {
    testing::TempDir dir("cli_pre_bundled");
    Run r = cli({"precheck", "--x-file", data_file("gdp.csv"), "--y-file", data_file("debt.csv"), "--out-dir",
                 dir.path().string()});
    CHECK(r.code == kExitOk);
}

TEST_CASE("config file and environment supply defaults") {
    testing::TempDir dir("cli_cfg"), env_dir("cli_env");
    const auto cfg = dir.file("run.toml", "models = \"qr\"\nscale = 1e-6\n");
    Run r = cli({"fit", "--config", cfg.string(), "--x-file", data_file("gdp.csv"), "--y-file",
                 data_file("debt.csv"), "--out-dir", dir.path().string()});
    REQUIRE(r.code == kExitOk);
    CHECK(std::filesystem::exists(dir.path() / "fit_qr.json"));
    CHECK(!std::filesystem::exists(dir.path() / "fit_slr.json"));

    ::setenv("SWAPFIT_OUT_DIR", env_dir.path().string().c_str(), 1);
    Run e = cli({"fit", "--x-file", data_file("gdp.csv"), "--y-file", data_file("debt.csv"), "--models", "slr"});
    ::unsetenv("SWAPFIT_OUT_DIR");
    REQUIRE(e.code == kExitOk);
    CHECK(std::filesystem::exists(env_dir.path() / "fit_slr.json"));
}

TEST_CASE("reruns produce byte-identical results and downstream commands chain") {
    testing::TempDir a("cli_rerun_a"), b("cli_rerun_b");
    for (auto* d : {&a, &b}) {
        REQUIRE(cli({"fit", "--x-file", data_file("gdp.csv"), "--y-file", data_file("debt.csv"), "--models",
                     "gmm-quadratic", "--restarts", "4", "--out-dir", d->path().string()})
                    .code == kExitOk);
        REQUIRE(cli({"gof", "--out-dir", d->path().string()}).code == kExitOk);
        REQUIRE(cli({"timeline", "--x-file", data_file("gdp.csv"), "--y-file", data_file("debt.csv"),
                     "--out-dir", d->path().string()})
                    .code == kExitOk);
    }
    for (const char* f : {"fit_gmm-quadratic.json", "comparison.csv", "scatter_gmm-quadratic.svg",
                          "gof_gmm-quadratic.json", "hist_gmm-quadratic.csv", "timeline.csv", "segments.json"}) {
        CAPTURE(f);
        CHECK(sha256_file(a.path() / f) == sha256_file(b.path() / f));
    }
    auto rows = csv_rows(a.path() / "timeline.csv");
    CHECK(rows.front() == std::vector<std::string>{"quarter", "z_raw", "z_smooth", "p1", "driver"});
    CHECK(rows.size() == 230);
}

TEST_CASE("the built executable runs") {
    const std::string cmd = std::string("\"") + SWAPFIT_CLI_PATH + "\" --help > /dev/null";
    CHECK(std::system(cmd.c_str()) == 0);
}

}
