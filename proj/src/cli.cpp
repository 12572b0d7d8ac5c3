#include "swapfit/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "swapfit/beta_gof.hpp"
#include "swapfit/causality.hpp"
#include "swapfit/densities.hpp"
#include "swapfit/error.hpp"
#include "swapfit/report.hpp"
#include "swapfit/swap.hpp"
#include "swapfit/synthetic.hpp"
#include "swapfit/timeline.hpp"

namespace fs = std::filesystem;

namespace swapfit {

namespace {

struct Options {
    std::string x_file = "data/gdp.csv";
    std::string y_file = "data/debt.csv";
    double scale = 1e-6;
    std::string variant = "gmm";
    std::string family = "quadratic";
    std::uint64_t seed = 42;
    int restarts = 20;
    int max_iters = 500;
    double tol = 1e-8;
    std::size_t smooth_window = 5;
    std::string out_dir = "swapfit-out";
    std::vector<std::string> models;
    std::size_t max_lag = 8;
    std::string truth_file;
    std::string scenario_file;
    bool brute_force = false;
};

const std::vector<std::string> kAllModels{"slr",        "qr",          "gmm-linear", "gmm-quadratic",
                                          "beta-linear", "beta-quadratic"};

bool is_swap_model(const std::string& name) { return name != "slr" && name != "qr"; }

struct SwapModelName {
    Variant variant;
    Family family;
};

SwapModelName split_model(const std::string& name) {
    const auto dash = name.find('-');
    if (dash == std::string::npos) throw Error(ErrorKind::InvalidArgument, "unknown model '" + name + "'");
    return {parse_variant(name.substr(0, dash)), parse_family(name.substr(dash + 1))};
}

std::vector<std::string> selected_models(const Options& o) {
    if (o.models.empty()) return kAllModels;
    for (const auto& m : o.models) {
        if (std::find(kAllModels.begin(), kAllModels.end(), m) == kAllModels.end()) {
            throw Error(ErrorKind::InvalidArgument, "unknown model '" + m + "'");
        }
    }
    return o.models;
}

Json options_json(const Options& o) {
    return Json{{"x_file", o.x_file},     {"y_file", o.y_file},       {"scale", o.scale},
                {"variant", o.variant},   {"family", o.family},       {"seed", o.seed},
                {"restarts", o.restarts}, {"max_iters", o.max_iters}, {"tol", o.tol},
                {"smooth_window", o.smooth_window}, {"models", o.models}, {"max_lag", o.max_lag}};
}

SeriesPair load_pair(const Options& o) {
    return scale_pair(align_pair(load_series_csv(o.x_file), load_series_csv(o.y_file)), o.scale);
}

SwapConfig swap_config(const Options& o, Variant v, Family f) {
    SwapConfig cfg;
    cfg.variant = v;
    cfg.family = f;
    cfg.tol_g = o.tol;
    cfg.max_iters = o.max_iters;
    cfg.restarts = o.restarts;
    cfg.seed = o.seed;
    validate(cfg);
    return cfg;
}

class ManifestWriter {
public:
    ManifestWriter(std::string command, const Options& o) {
        m_.command = std::move(command);
        m_.config = options_json(o);
        m_.seed = o.seed;
        m_.version = artifact_version();
        m_.started_utc = utc_timestamp();
    }
    void add_input(const fs::path& p) { m_.inputs.push_back({p.string(), sha256_file(p)}); }
    void write(const fs::path& dir) {
        m_.finished_utc = utc_timestamp();
        write_json(dir / "manifest.json", to_json(m_));
    }

private:
    RunManifest m_;
};

std::string coefficient_cell(const ModelSpec& m, std::size_t i) {
    if (i >= m.coefficients.size()) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", m.coefficients[i]);
    return buf;
}

std::optional<Assignment> read_truth(const std::string& path) {
    if (path.empty()) return std::nullopt;
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::FileNotFound, path);
    Json j = Json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.contains("z_true")) throw Error(ErrorKind::ParseError, path + ": no z_true");
    Assignment z;
    for (const auto& v : j.at("z_true")) z.push_back(static_cast<std::uint8_t>(v.get<int>() != 0));
    return z;
}

int cmd_fit(const Options& o, std::ostream& out, std::ostream& err) {
    const SeriesPair pair = load_pair(o);
    const fs::path dir = o.out_dir;
    ManifestWriter manifest("fit", o);
    manifest.add_input(o.x_file);
    manifest.add_input(o.y_file);
    const auto truth = read_truth(o.truth_file);
    if (truth) {
        manifest.add_input(o.truth_file);
        if (truth->size() != pair.size()) throw Error(ErrorKind::LengthMismatch, "truth length differs from data");
    }
    const MarginalDensities densities{fit_exponential(pair.x), fit_exponential(pair.y)};

    std::string table = "model,a,b,c,objective,n0,n1,z_accuracy,status\n";
    char row[256];
    bool any_failed = false;
    for (const auto& name : selected_models(o)) {
        if (!is_swap_model(name)) {
            const ModelSpec m = ols_fit(pair, name == "slr" ? Family::Linear : Family::Quadratic);
            write_json(dir / ("fit_" + name + ".json"), fit_json(name, m));
            std::snprintf(row, sizeof row, "%s,%s,%s,%s,,,,,ok\n", name.c_str(), coefficient_cell(m, 0).c_str(),
                          coefficient_cell(m, 1).c_str(), coefficient_cell(m, 2).c_str());
            table += row;
            continue;
        }
        const auto [variant, family] = split_model(name);
        try {
            const SwapFit fit = run_swap(pair, swap_config(o, variant, family), densities);
            Json j = fit_json(name, pair, fit);
            std::string accuracy;
            if (truth) {
                std::size_t hits = 0;
                for (std::size_t i = 0; i < pair.size(); ++i) hits += fit.final.z[i] == (*truth)[i];
                const double acc = static_cast<double>(hits) / static_cast<double>(pair.size());
                j["z_accuracy"] = acc;
                accuracy = std::to_string(acc);
            }
            write_json(dir / ("fit_" + name + ".json"), j);
            const FitArtifact art = fit_from_json(j);
            write_text(dir / ("scatter_" + name + ".csv"), scatter_csv(pair, art));
            write_text(dir / ("scatter_" + name + ".svg"),
                       scatter_svg(pair, fit.final.z, &fit.final.model, "SWAP " + name));
            const ModelSpec& m = fit.final.model;
            std::snprintf(row, sizeof row, "%s,%s,%s,%s,%.10g,%zu,%zu,%s,ok\n", name.c_str(),
                          coefficient_cell(m, 0).c_str(), coefficient_cell(m, 1).c_str(),
                          coefficient_cell(m, 2).c_str(), fit.objective, fit.final.n0, fit.final.n1,
                          accuracy.c_str());
            table += row;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::AllRestartsFailed) throw;
            any_failed = true;
            err << "swapfit: " << name << ": " << e.what() << "\n";
            std::snprintf(row, sizeof row, "%s,,,,,,,,failed\n", name.c_str());
            table += row;
        }
    }
    write_text(dir / "comparison.csv", table);
    manifest.write(dir);
    out << table;
    return any_failed ? kExitFitFailure : kExitOk;
}

int cmd_precheck(const Options& o, std::ostream& out) {
    const SeriesPair pair = load_pair(o);
    const fs::path dir = o.out_dir;
    ManifestWriter manifest("precheck", o);
    manifest.add_input(o.x_file);
    manifest.add_input(o.y_file);

    const CausalityReport report = bidirectional_report(pair, o.max_lag);
    const RateEstimate rx = fit_exponential(pair.x), ry = fit_exponential(pair.y);
    const KsResult kx = ks_test_exponential(pair.x, rx.lambda), ky = ks_test_exponential(pair.y, ry.lambda);
    auto marginal = [](const RateEstimate& r, const KsResult& ks) {
        Json j = to_json(ks);
        j["lambda"] = r.lambda;
        return j;
    };
    const Json j{{"causality", to_json(report)},
                 {"exponential", {{"x", marginal(rx, kx)}, {"y", marginal(ry, ky)}}},
                 {"ks_note", "lambda is estimated from the tested sample, so the Kolmogorov p-value is "
                             "not distribution-free"}};
    write_json(dir / "precheck.json", j);
    const std::string table = format_granger_table(report);
    write_text(dir / "granger.txt", table);
    manifest.write(dir);

    out << table;
    char line[160];
    std::snprintf(line, sizeof line, "Exponential rate x: %.6f (K-S D = %.4f, log10 p = %.2f)\n", rx.lambda,
                  kx.d_statistic, kolmogorov_log10_p_value(kx.d_statistic, kx.n));
    out << line;
    std::snprintf(line, sizeof line, "Exponential rate y: %.6f (K-S D = %.4f, log10 p = %.2f)\n", ry.lambda,
                  ky.d_statistic, kolmogorov_log10_p_value(ky.d_statistic, ky.n));
    out << line;
    return report.bidirectional ? kExitOk : kExitNotBidirectional;
}

int cmd_gof(const Options& o, std::ostream& out) {
    const fs::path dir = o.out_dir;
    ManifestWriter manifest("gof", o);
    std::vector<std::string> names;
    for (const auto& m : selected_models(o)) {
        if (!is_swap_model(m)) continue;
        // An unselected default run tolerates fits that failed; an explicit list does not.
        if (o.models.empty() && !fs::exists(dir / ("fit_" + m + ".json"))) continue;
        names.push_back(m);
    }
    if (names.empty()) throw Error(ErrorKind::MissingFit, "no SWAP fit artifacts in " + dir.string());

    std::map<std::string, GofReport> reports;
    char line[200];
    for (const auto& name : names) {
        const fs::path path = dir / ("fit_" + name + ".json");
        const FitArtifact fit = read_fit(path);
        if (!fit.has_assignment()) throw Error(ErrorKind::MissingFit, path.string() + " has no posteriors");
        manifest.add_input(path);
        const GofReport r = fit_alpha_beta(fit.p1);
        write_json(dir / ("gof_" + name + ".json"), to_json(r));
        write_text(dir / ("hist_" + name + ".csv"), histogram_csv(r));
        reports[name] = r;
        std::snprintf(line, sizeof line, "%-15s alpha_hat = %s  beta_hat = %s  (n0 = %zu, n1 = %zu)\n",
                      name.c_str(), r.alpha_hat ? std::to_string(*r.alpha_hat).c_str() : "n/a",
                      r.beta_hat ? std::to_string(*r.beta_hat).c_str() : "n/a", r.n0, r.n1);
        out << line;
    }

    Json verdicts = Json::object();
    for (const char* v : {"gmm", "beta"}) {
        const auto lin = reports.find(std::string(v) + "-linear");
        const auto quad = reports.find(std::string(v) + "-quadratic");
        if (lin == reports.end() || quad == reports.end()) continue;
        const auto& l = lin->second;
        const auto& q = quad->second;
        if (l.one_sided() || q.one_sided()) {
            verdicts[v] = "undetermined";
            out << v << ": verdict undetermined (one-sided posteriors)\n";
            continue;
        }
        // Smaller estimates put more mass near 0 and 1, i.e. a surer assignment.
        const bool quad_better = *q.alpha_hat < *l.alpha_hat && *q.beta_hat < *l.beta_hat;
        const bool lin_better = *l.alpha_hat < *q.alpha_hat && *l.beta_hat < *q.beta_hat;
        const char* verdict = quad_better ? "quadratic" : lin_better ? "linear" : "mixed";
        verdicts[v] = verdict;
        out << v << ": better separation from " << verdict << "\n";
    }
    write_json(dir / "gof_verdict.json", verdicts);
    manifest.write(dir);
    return kExitOk;
}

int cmd_timeline(const Options& o, std::ostream& out) {
    const fs::path dir = o.out_dir;
    const std::string name = o.variant + "-" + o.family;
    split_model(name);
    const fs::path path = dir / ("fit_" + name + ".json");
    const FitArtifact fit = read_fit(path);
    if (!fit.has_assignment()) throw Error(ErrorKind::MissingFit, path.string() + " has no assignment");
    ManifestWriter manifest("timeline", o);
    manifest.add_input(path);

    const auto segments = timeline_segments(fit.z, fit.index, o.smooth_window);
    const Assignment smooth = median_filter(fit.z, o.smooth_window);
    std::string csv = "quarter,z_raw,z_smooth,p1,driver\n";
    char line[128];
    for (std::size_t i = 0; i < fit.z.size(); ++i) {
        std::snprintf(line, sizeof line, "%s,%d,%d,%.10g,%s\n", fit.index[i].label().c_str(), fit.z[i], smooth[i],
                      fit.p1[i], to_string(smooth[i] ? Driver::XDrives : Driver::YDrives));
        csv += line;
    }
    write_text(dir / "timeline.csv", csv);
    write_json(dir / "segments.json", Json{{"model", name}, {"smooth_window", o.smooth_window},
                                           {"segments", to_json(segments)}});
    manifest.write(dir);
    for (const auto& s : segments) {
        out << s.start.label() << " - " << s.end.label() << "  " << to_string(s.driver) << "\n";
    }
    return kExitOk;
}

struct Scenario {
    SyntheticTruth truth;
    std::size_t n = 0;
    double rate_x = 1.0;
    double rate_y = 1.0;
};

Scenario read_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::FileNotFound, path);
    Json j = Json::parse(in, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorKind::ParseError, path + " is not valid JSON");
    Scenario s;
    try {
        s.truth.model = model_from_json(j.at("model"));
        s.truth.sigma0_sq = j.at("sigma0_sq").get<double>();
        s.truth.sigma1_sq = j.at("sigma1_sq").get<double>();
        s.truth.seed = j.at("seed").get<std::uint64_t>();
        s.truth.pi1 = j.value("pi1", 0.5);
        if (j.contains("z_true")) {
            for (const auto& v : j.at("z_true")) s.truth.z_true.push_back(static_cast<std::uint8_t>(v.get<int>() != 0));
        }
        s.n = j.at("n").get<std::size_t>();
        s.rate_x = j.at("rate_x").get<double>();
        s.rate_y = j.at("rate_y").get<double>();
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::ParseError, path + ": " + e.what());
    }
    return s;
}

int cmd_synth(const Options& o, std::ostream& out) {
    if (o.scenario_file.empty()) throw Error(ErrorKind::InvalidArgument, "--scenario is required");
    const Scenario sc = read_scenario(o.scenario_file);
    const fs::path dir = o.out_dir;
    ManifestWriter manifest("synth", o);
    manifest.add_input(o.scenario_file);

    auto [pair, truth] = generate(sc.truth, sc.n, sc.rate_x, sc.rate_y);
    fs::create_directories(dir);
    write_series_csv(dir / "synth_x.csv", x_series(pair, "X"));
    write_series_csv(dir / "synth_y.csv", y_series(pair, "Y"));
    std::vector<int> z(truth.z_true.begin(), truth.z_true.end());
    Json tj{{"model", to_json(truth.model)}, {"sigma0_sq", truth.sigma0_sq}, {"sigma1_sq", truth.sigma1_sq},
            {"seed", truth.seed},            {"pi1", truth.pi1},             {"n", sc.n},
            {"rate_x", sc.rate_x},           {"rate_y", sc.rate_y},          {"z_true", z}};
    if (o.brute_force) {
        const MarginalDensities d{fit_exponential(pair.x), fit_exponential(pair.y)};
        const BruteForceResult bf = brute_force_best_assignment(pair, truth.model.family, d);
        tj["brute_force"] = {{"z", std::vector<int>(bf.z.begin(), bf.z.end())},
                             {"objective", bf.objective},
                             {"model", to_json(bf.state.model)}};
        out << "brute-force objective: " << bf.objective << "\n";
    }
    write_json(dir / "truth.json", tj);
    manifest.write(dir);
    out << "wrote " << sc.n << " points to " << dir.string() << "\n";
    return kExitOk;
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::AllRestartsFailed:
        case ErrorKind::NonMonotoneFit:
        case ErrorKind::TrustRegionExhausted:
            return kExitFitFailure;
        default:
            return kExitInputError;
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"SWAP regression: latent-direction fits of two series"};
    app.set_config("--config", "", "Read options from a TOML/INI file; flags override it");
    app.require_subcommand(1);
    app.add_option("--x-file", o.x_file, "CSV with a DATE column and the X series")->capture_default_str();
    app.add_option("--y-file", o.y_file, "CSV with a DATE column and the Y series")->capture_default_str();
    app.add_option("--scale", o.scale, "Multiplier applied to both series")->capture_default_str();
    app.add_option("--variant", o.variant, "gmm or beta")->capture_default_str();
    app.add_option("--family", o.family, "linear or quadratic")->capture_default_str();
    app.add_option("--seed", o.seed)->capture_default_str();
    app.add_option("--restarts", o.restarts)->capture_default_str();
    app.add_option("--max-iters", o.max_iters)->capture_default_str();
    app.add_option("--tol", o.tol, "Stop when the model moves less than this")->capture_default_str();
    app.add_option("--smooth-window", o.smooth_window, "Odd median-filter width for timelines")
        ->capture_default_str();
    app.add_option("--out-dir", o.out_dir)->envname("SWAPFIT_OUT_DIR")->capture_default_str();
    app.add_option("--models", o.models, "Subset of slr,qr,gmm-linear,gmm-quadratic,beta-linear,beta-quadratic")
        ->delimiter(',');
    app.add_option("--max-lag", o.max_lag, "Largest Granger lag")->capture_default_str();

    auto* fit = app.add_subcommand("fit", "Fit the regression and SWAP models")->fallthrough();
    fit->add_option("--truth", o.truth_file, "truth.json from synth; adds z accuracy");
    auto* precheck = app.add_subcommand("precheck", "Granger, ADF and exponential-marginal checks")->fallthrough();
    auto* gof = app.add_subcommand("gof", "Beta goodness of fit of SWAP posteriors")->fallthrough();
    auto* timeline = app.add_subcommand("timeline", "Driver segments from a SWAP fit")->fallthrough();
    auto* synth = app.add_subcommand("synth", "Generate a synthetic pair from a scenario")->fallthrough();
    synth->add_option("--scenario", o.scenario_file, "Scenario JSON");
    synth->add_flag("--brute-force", o.brute_force, "Record the enumeration optimum (n <= 12)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (*fit) return cmd_fit(o, out, err);
        if (*precheck) return cmd_precheck(o, out);
        if (*gof) return cmd_gof(o, out);
        if (*timeline) return cmd_timeline(o, out);
        if (*synth) return cmd_synth(o, out);
    } catch (const Error& e) {
        err << "swapfit: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "swapfit: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}

}  // namespace swapfit
