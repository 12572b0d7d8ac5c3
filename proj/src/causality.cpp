#include "swapfit/causality.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "swapfit/error.hpp"
#include "swapfit/stats.hpp"

namespace swapfit {

std::string to_string(Direction d) { return d == Direction::YtoX ? "YtoX" : "XtoY"; }

std::string to_string(PBracket b) {
    switch (b) {
        case PBracket::Below1: return "<0.01";
        case PBracket::Above10: return ">0.10";
        case PBracket::Interpolated: break;
    }
    return "interpolated";
}

GrangerResult granger_test(const SeriesPair& pair, Direction direction, std::size_t lag) {
    if (lag == 0) throw Error(ErrorKind::InvalidArgument, "granger lag must be >= 1");
    const std::size_t n = pair.size();
    if (n <= 2 * lag + 2) {
        throw Error(ErrorKind::InsufficientData, "granger test needs n > 2*lag + 2");
    }
    const auto& target = direction == Direction::YtoX ? pair.x : pair.y;
    const auto& source = direction == Direction::YtoX ? pair.y : pair.x;

    const auto m = static_cast<Eigen::Index>(n - lag);
    const auto k = static_cast<Eigen::Index>(lag);
    Eigen::VectorXd response(m);
    Eigen::MatrixXd full(m, 1 + 2 * k);
    for (Eigen::Index r = 0; r < m; ++r) {
        const std::size_t t = static_cast<std::size_t>(r) + lag;
        response(r) = target[t];
        full(r, 0) = 1.0;
        for (Eigen::Index j = 1; j <= k; ++j) {
            full(r, j) = target[t - static_cast<std::size_t>(j)];
            full(r, k + j) = source[t - static_cast<std::size_t>(j)];
        }
    }
    const OlsResult restricted = ols(full.leftCols(1 + k), response);
    const OlsResult unrestricted = ols(full, response);

    GrangerResult out;
    out.direction = direction;
    out.lag = lag;
    out.rss_restricted = restricted.rss;
    out.rss_unrestricted = unrestricted.rss;
    out.df_num = lag;
    out.df_den = static_cast<std::size_t>(m) - 2 * lag - 1;
    // The restricted model is nested, so any excess of rss_u is rounding noise.
    const double gain = std::max(out.rss_restricted - out.rss_unrestricted, 0.0);
    if (out.rss_unrestricted > 0.0) {
        out.f_stat = (gain / static_cast<double>(out.df_num))
                     / (out.rss_unrestricted / static_cast<double>(out.df_den));
        out.p_value = f_upper_tail(out.f_stat, static_cast<double>(out.df_num),
                                   static_cast<double>(out.df_den));
    } else {
        out.f_stat = gain > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        out.p_value = gain > 0.0 ? 0.0 : 1.0;
    }
    out.residuals.assign(unrestricted.residuals.data(),
                         unrestricted.residuals.data() + unrestricted.residuals.size());
    return out;
}

namespace {

struct CvRow {
    double n;
    double one, five, ten;
};

// Fuller's constant-only table; the last row is the asymptotic limit.
constexpr std::array<CvRow, 6> kAdfTable{{
    {25, -3.75, -3.00, -2.63},
    {50, -3.58, -2.93, -2.60},
    {100, -3.51, -2.89, -2.58},
    {250, -3.46, -2.88, -2.57},
    {500, -3.44, -2.87, -2.57},
    {std::numeric_limits<double>::infinity(), -3.43, -2.86, -2.57},
}};

struct AdfFit {
    double t_stat;
    double aic;
    std::size_t nobs;
};

// Regression on observations t = first..n-1 of the differenced equation.
AdfFit adf_regression(std::span<const double> r, std::size_t lag, std::size_t first) {
    const std::size_t n = r.size();
    const auto m = static_cast<Eigen::Index>(n - first);
    const auto k = static_cast<Eigen::Index>(2 + lag);
    Eigen::MatrixXd design(m, k);
    Eigen::VectorXd response(m);
    for (Eigen::Index row = 0; row < m; ++row) {
        const std::size_t t = first + static_cast<std::size_t>(row);
        response(row) = r[t] - r[t - 1];
        design(row, 0) = 1.0;
        design(row, 1) = r[t - 1];
        for (std::size_t j = 1; j <= lag; ++j) {
            design(row, static_cast<Eigen::Index>(1 + j)) = r[t - j] - r[t - j - 1];
        }
    }
    const OlsResult fit = ols(design, response);
    const double md = static_cast<double>(m);
    const double se = fit.standard_errors(1);
    AdfFit out;
    out.t_stat = se > 0.0 ? fit.coefficients(1) / se : -std::numeric_limits<double>::infinity();
    out.aic = md * std::log(std::max(fit.rss, std::numeric_limits<double>::min()) / md)
              + 2.0 * static_cast<double>(k);
    out.nobs = static_cast<std::size_t>(m);
    return out;
}

void check_adf_length(std::size_t n, std::size_t lag) {
    if (n <= lag + 3) throw Error(ErrorKind::InsufficientData, "ADF test needs n > lag + 3");
}

}  // namespace

CriticalValues adf_critical_values(std::size_t nobs) {
    const double n = static_cast<double>(nobs);
    if (n <= kAdfTable.front().n) {
        const auto& r = kAdfTable.front();
        return {r.one, r.five, r.ten};
    }
    for (std::size_t i = 1; i < kAdfTable.size(); ++i) {
        const auto& hi = kAdfTable[i];
        if (n > hi.n) continue;
        const auto& lo = kAdfTable[i - 1];
        // Critical values are close to linear in 1/n, which also handles the infinite row.
        const double w = (1.0 / lo.n - 1.0 / n) / (1.0 / lo.n - 1.0 / hi.n);
        return {lo.one + w * (hi.one - lo.one), lo.five + w * (hi.five - lo.five),
                lo.ten + w * (hi.ten - lo.ten)};
    }
    const auto& r = kAdfTable.back();
    return {r.one, r.five, r.ten};
}

AdfResult adf_test(std::span<const double> series, std::size_t lag_order) {
    check_adf_length(series.size(), lag_order);
    const AdfFit fit = adf_regression(series, lag_order, lag_order + 1);
    AdfResult out;
    out.t_stat = fit.t_stat;
    out.lag_order = lag_order;
    out.nobs = fit.nobs;
    out.critical = adf_critical_values(fit.nobs);
    const auto& cv = out.critical;
    if (out.t_stat < cv.one) {
        out.bracket = PBracket::Below1;
        out.p_value = 0.01;
    } else if (out.t_stat > cv.ten) {
        out.bracket = PBracket::Above10;
        out.p_value = 0.10;
    } else if (out.t_stat <= cv.five) {
        out.p_value = 0.01 + 0.04 * (out.t_stat - cv.one) / (cv.five - cv.one);
    } else {
        out.p_value = 0.05 + 0.05 * (out.t_stat - cv.five) / (cv.ten - cv.five);
    }
    return out;
}

std::size_t select_adf_lag(std::span<const double> series, std::size_t max_lag) {
    std::size_t cap = max_lag;
    // Shrink the search until the common sample leaves room for the largest model.
    while (cap > 0 && series.size() <= 2 * cap + 4) --cap;
    check_adf_length(series.size(), cap);
    std::size_t best = 0;
    double best_aic = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p <= cap; ++p) {
        const double aic = adf_regression(series, p, cap + 1).aic;
        if (aic < best_aic) {
            best_aic = aic;
            best = p;
        }
    }
    return best;
}

CausalityReport bidirectional_report(const SeriesPair& pair, std::size_t max_lag) {
    if (max_lag == 0) throw Error(ErrorKind::InvalidArgument, "max_lag must be >= 1");
    CausalityReport report;
    report.granger.resize(2 * max_lag);
    const std::array<Direction, 2> dirs{Direction::YtoX, Direction::XtoY};
    const auto total = static_cast<long>(2 * max_lag);
    // Exceptions cannot cross the OpenMP region, so capture the first by index.
    std::vector<std::exception_ptr> errors(2 * max_lag);
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < total; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        try {
            report.granger[ui] = granger_test(pair, dirs[ui / max_lag], ui % max_lag + 1);
        } catch (...) {
            errors[ui] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    auto best_of = [&](std::size_t offset) {
        std::size_t best = offset;
        for (std::size_t i = offset; i < offset + max_lag; ++i) {
            if (report.granger[i].p_value < report.granger[best].p_value) best = i;
        }
        return best;
    };
    const std::size_t by = best_of(0);
    const std::size_t bx = best_of(max_lag);
    report.best_lag_y_to_x = report.granger[by].lag;
    report.best_lag_x_to_y = report.granger[bx].lag;

    auto adf_on = [](const std::vector<double>& resid) {
        return adf_test(resid, select_adf_lag(resid, 8));
    };
    report.adf_y_to_x = adf_on(report.granger[by].residuals);
    report.adf_x_to_y = adf_on(report.granger[bx].residuals);
    report.bidirectional = report.granger[by].p_value < kGrangerLevel
                           && report.granger[bx].p_value < kGrangerLevel;
    return report;
}

std::string format_granger_table(const CausalityReport& report) {
    std::string out;
    char line[160];
    for (Direction d : {Direction::YtoX, Direction::XtoY}) {
        out += d == Direction::YtoX ? "Granger causality test: x ~ Lags(x) + Lags(y)\n"
                                    : "Granger causality test: y ~ Lags(y) + Lags(x)\n";
        std::snprintf(line, sizeof line, "%4s %8s %4s %12s %14s\n", "Lag", "Res.Df", "Df", "F",
                      "Pr(>F)");
        out += line;
        for (const auto& g : report.granger) {
            if (g.direction != d) continue;
            const char* stars = g.p_value < 0.001 ? "***"
                                : g.p_value < 0.01 ? "**"
                                : g.p_value < 0.05 ? "*"
                                : g.p_value < 0.1  ? "."
                                                   : "";
            std::snprintf(line, sizeof line, "%4zu %8zu %4zu %12.4f %14.4g %s\n", g.lag, g.df_den,
                          g.df_num, g.f_stat, g.p_value, stars);
            out += line;
        }
        out += "\n";
    }
    for (const auto* a : {&report.adf_y_to_x, &report.adf_x_to_y}) {
        std::snprintf(line, sizeof line,
                      "ADF (%s residuals, lag %zu, n=%zu): t = %.4f, p %s%s\n",
                      a == &report.adf_y_to_x ? "YtoX" : "XtoY", a->lag_order, a->nobs, a->t_stat,
                      a->bracket == PBracket::Interpolated ? "= " : "",
                      a->bracket == PBracket::Interpolated
                          ? std::to_string(a->p_value).c_str()
                          : to_string(a->bracket).c_str());
        out += line;
    }
    out += report.bidirectional ? "Bidirectional at 0.05: yes\n" : "Bidirectional at 0.05: no\n";
    return out;
}

}  // namespace swapfit
