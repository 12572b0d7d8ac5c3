#include "swapfit/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <memory>
#include <sstream>

#include "swapfit/error.hpp"

#ifndef SWAPFIT_VERSION
#define SWAPFIT_VERSION "0.0.0"
#endif

namespace swapfit {

const char* artifact_version() { return SWAPFIT_VERSION; }

Json to_json(const ModelSpec& m) {
    return Json{{"family", to_string(m.family)}, {"coefficients", m.coefficients}};
}

ModelSpec model_from_json(const Json& j) {
    try {
        ModelSpec m{parse_family(j.at("family").get<std::string>()),
                    j.at("coefficients").get<std::vector<double>>()};
        validate(m);
        return m;
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("model: ") + e.what());
    } catch (const Error& e) {
        // An unknown family or wrong coefficient count is a malformed file here.
        throw Error(ErrorKind::ParseError, std::string("model: ") + e.what());
    }
}

Json to_json(const SwapConfig& cfg) {
    return Json{{"variant", to_string(cfg.variant)}, {"family", to_string(cfg.family)},
                {"tol_g", cfg.tol_g},                {"max_iters", cfg.max_iters},
                {"restarts", cfg.restarts},          {"seed", cfg.seed},
                {"variance_floor", cfg.variance_floor}};
}

Json to_json(const KsResult& ks) {
    return Json{{"d", ks.d_statistic},
                {"p", ks.p_value},
                {"log10_p", kolmogorov_log10_p_value(ks.d_statistic, ks.n)},
                {"n", ks.n}};
}

Json to_json(const RateEstimate& r) { return Json{{"lambda", r.lambda}, {"n", r.n}}; }

namespace {

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json to_json(const GofReport& r) {
    return Json{{"alpha_hat", optional_json(r.alpha_hat)},
                {"beta_hat", optional_json(r.beta_hat)},
                {"gamma", r.gamma},
                {"eps_sum", optional_json(r.eps_sum)},
                {"n0", r.n0},
                {"n1", r.n1},
                {"clamp_count", r.clamp_count},
                {"one_sided", r.one_sided()},
                {"histogram", r.histogram}};
}

Json to_json(const GrangerResult& g) {
    return Json{{"direction", to_string(g.direction)},
                {"lag", g.lag},
                {"f_stat", g.f_stat},
                {"p_value", g.p_value},
                {"rss_restricted", g.rss_restricted},
                {"rss_unrestricted", g.rss_unrestricted},
                {"df_num", g.df_num},
                {"df_den", g.df_den}};
}

Json to_json(const AdfResult& a) {
    return Json{{"t_stat", a.t_stat},
                {"lag_order", a.lag_order},
                {"nobs", a.nobs},
                {"p_value_bracket", to_string(a.bracket)},
                {"p_value", a.p_value},
                {"critical_values", {{"1%", a.critical.one}, {"5%", a.critical.five}, {"10%", a.critical.ten}}}};
}

Json to_json(const CausalityReport& r) {
    Json granger = Json::array();
    for (const auto& g : r.granger) granger.push_back(to_json(g));
    return Json{{"granger", granger},
                {"best_lag", {{"YtoX", r.best_lag_y_to_x}, {"XtoY", r.best_lag_x_to_y}}},
                {"adf", {{"YtoX", to_json(r.adf_y_to_x)}, {"XtoY", to_json(r.adf_x_to_y)}}},
                {"bidirectional", r.bidirectional}};
}

Json to_json(const std::vector<Segment>& segments) {
    Json out = Json::array();
    for (const auto& s : segments) {
        out.push_back({{"start", s.start.label()}, {"end", s.end.label()}, {"driver", to_string(s.driver)}});
    }
    return out;
}

Json fit_json(const std::string& name, const SeriesPair& pair, const SwapFit& fit) {
    std::vector<std::string> quarters;
    std::vector<int> z;
    std::vector<double> p1;
    for (std::size_t i = 0; i < pair.size(); ++i) {
        quarters.push_back(pair.index[i].label());
        z.push_back(fit.final.z[i]);
        p1.push_back(fit.posteriors[i].p1);
    }
    Json restarts = Json::array();
    for (double v : fit.restart_objectives) restarts.push_back(std::isnan(v) ? Json(nullptr) : Json(v));
    return Json{{"name", name},
                {"model", to_json(fit.final.model)},
                {"config", to_json(fit.config)},
                {"sigma0_sq", fit.final.sigma0_sq},
                {"sigma1_sq", fit.final.sigma1_sq},
                {"pi0", fit.final.pi0},
                {"pi1", fit.final.pi1},
                {"n0", fit.final.n0},
                {"n1", fit.final.n1},
                {"iterations", fit.final.iteration},
                {"objective", fit.objective},
                {"initial_objective", fit.initial_objective},
                {"objective_trace", fit.objective_trace},
                {"stop_reason", to_string(fit.stop_reason)},
                {"restart_index_chosen", fit.restart_index_chosen},
                {"restart_objectives", restarts},
                {"clamp_fired", fit.clamp_fired},
                {"quarters", quarters},
                {"z", z},
                {"p1", p1}};
}

Json fit_json(const std::string& name, const ModelSpec& plain) {
    return Json{{"name", name}, {"model", to_json(plain)}};
}

namespace {

QuarterIndex parse_label(const std::string& s) {
    int year = 0, quarter = 0;
    char tail = 0;
    if (std::sscanf(s.c_str(), "%dQ%d%c", &year, &quarter, &tail) != 2 || quarter < 1 || quarter > 4) {
        throw Error(ErrorKind::ParseError, "bad quarter label '" + s + "'");
    }
    return {year, quarter};
}

}  // namespace

FitArtifact fit_from_json(const Json& j) {
    FitArtifact a;
    try {
        a.name = j.at("name").get<std::string>();
        a.model = model_from_json(j.at("model"));
        if (j.contains("z")) {
            for (const auto& q : j.at("quarters")) a.index.push_back(parse_label(q.get<std::string>()));
            for (const auto& v : j.at("z")) a.z.push_back(static_cast<std::uint8_t>(v.get<int>() != 0));
            a.p1 = j.at("p1").get<std::vector<double>>();
            if (a.z.size() != a.index.size() || a.p1.size() != a.index.size()) {
                throw Error(ErrorKind::ParseError, "fit arrays differ in length");
            }
        }
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("fit artifact: ") + e.what());
    }
    return a;
}

FitArtifact read_fit(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::MissingFit, "no fit artifact at " + path.string());
    Json j = Json::parse(in, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorKind::ParseError, path.string() + " is not valid JSON");
    return fit_from_json(j);
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::FileNotFound, path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    char buf[1 << 14];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);
    std::string hex;
    char pair[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(pair, sizeof pair, "%02x", digest[i]);
        hex += pair;
    }
    return hex;
}

Json to_json(const RunManifest& m) {
    Json inputs = Json::array();
    for (const auto& d : m.inputs) inputs.push_back({{"path", d.path}, {"sha256", d.sha256}});
    return Json{{"command", m.command},     {"config", m.config},
                {"inputs", inputs},         {"seed", m.seed},
                {"version", m.version},     {"started_utc", m.started_utc},
                {"finished_utc", m.finished_utc}};
}

RunManifest manifest_from_json(const Json& j) {
    RunManifest m;
    try {
        m.command = j.at("command").get<std::string>();
        m.config = j.at("config");
        for (const auto& d : j.at("inputs")) {
            m.inputs.push_back({d.at("path").get<std::string>(), d.at("sha256").get<std::string>()});
        }
        m.seed = j.at("seed").get<std::uint64_t>();
        m.version = j.at("version").get<std::string>();
        m.started_utc = j.at("started_utc").get<std::string>();
        m.finished_utc = j.at("finished_utc").get<std::string>();
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("manifest: ") + e.what());
    }
    return m;
}

bool inputs_match(const RunManifest& m) {
    for (const auto& d : m.inputs) {
        try {
            if (sha256_file(d.path) != d.sha256) return false;
        } catch (const Error&) {
            return false;
        }
    }
    return true;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::FileNotFound, "cannot write " + path.string());
    out << text;
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string scatter_svg(const SeriesPair& pair, const Assignment& z, const ModelSpec* curve,
                        const std::string& title) {
    constexpr double W = 800, H = 600, L = 70, R = 20, T = 40, B = 60;
    const auto [xmin_it, xmax_it] = std::minmax_element(pair.x.begin(), pair.x.end());
    const auto [ymin_it, ymax_it] = std::minmax_element(pair.y.begin(), pair.y.end());
    double x0 = pair.size() ? *xmin_it : 0.0, x1 = pair.size() ? *xmax_it : 1.0;
    double y0 = pair.size() ? *ymin_it : 0.0, y1 = pair.size() ? *ymax_it : 1.0;
    if (x1 <= x0) x1 = x0 + 1.0;
    if (y1 <= y0) y1 = y0 + 1.0;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(2);
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n"
      << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n"
      << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" << xml_escape(title)
      << "</text>\n"
      << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
        s << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\" font-size=\"11\">"
          << xv << "</text>\n"
          << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\" font-size=\"11\">" << yv
          << "</text>\n";
    }
    s << "<text x=\"400\" y=\"" << H - 16 << "\" text-anchor=\"middle\" font-size=\"13\">X</text>\n"
      << "<text x=\"18\" y=\"300\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 300)\">Y</text>\n";
    for (std::size_t i = 0; i < pair.size(); ++i) {
        const bool one = i < z.size() && z[i];
        s << "<circle cx=\"" << px(pair.x[i]) << "\" cy=\"" << py(pair.y[i]) << "\" r=\"3\" fill=\""
          << (one ? "#1f77b4" : "#ff7f0e") << "\"/>\n";
    }
    if (curve) {
        s << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
        for (int k = 0; k <= 200; ++k) {
            const double xv = x0 + (x1 - x0) * k / 200.0;
            const double yv = forward(*curve, xv);
            if (yv < y0 || yv > y1) continue;
            s << px(xv) << "," << py(yv) << " ";
        }
        s << "\"/>\n";
    }
    s << "<circle cx=\"" << W - 150 << "\" cy=\"" << T + 10 << "\" r=\"4\" fill=\"#1f77b4\"/>"
      << "<text x=\"" << W - 140 << "\" y=\"" << T + 14 << "\" font-size=\"12\">Z=1 (X explains)</text>\n"
      << "<circle cx=\"" << W - 150 << "\" cy=\"" << T + 28 << "\" r=\"4\" fill=\"#ff7f0e\"/>"
      << "<text x=\"" << W - 140 << "\" y=\"" << T + 32 << "\" font-size=\"12\">Z=0 (Y explains)</text>\n"
      << "</svg>\n";
    return s.str();
}

std::string scatter_csv(const SeriesPair& pair, const FitArtifact& fit) {
    std::string out = "quarter,x,y,z,p1\n";
    char line[160];
    for (std::size_t i = 0; i < pair.size(); ++i) {
        const bool has = i < fit.z.size();
        std::snprintf(line, sizeof line, "%s,%.17g,%.17g,%s,%s\n", pair.index[i].label().c_str(), pair.x[i],
                      pair.y[i], has ? (fit.z[i] ? "1" : "0") : "",
                      has ? std::to_string(fit.p1[i]).c_str() : "");
        out += line;
    }
    return out;
}

std::string histogram_csv(const GofReport& r) {
    std::string out = "bin_left,bin_right,count\n";
    char line[96];
    for (std::size_t b = 0; b < kHistogramBins; ++b) {
        const double w = 1.0 / static_cast<double>(kHistogramBins);
        std::snprintf(line, sizeof line, "%.2f,%.2f,%zu\n", b * w, (b + 1) * w, r.histogram[b]);
        out += line;
    }
    return out;
}

}  // namespace swapfit
