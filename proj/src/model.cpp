#include "swapfit/model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "swapfit/error.hpp"
#include "swapfit/kernels.hpp"
#include "swapfit/simplex.hpp"
#include "swapfit/summation.hpp"

namespace swapfit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

Range x_range(const SeriesPair& pair) {
    auto [lo, hi] = std::minmax_element(pair.x.begin(), pair.x.end());
    return {*lo, *hi};
}

void check_inputs(const SeriesPair& pair, std::span<const std::uint8_t> z, Family family) {
    if (z.size() != pair.size() || pair.y.size() != pair.size()) {
        throw Error(ErrorKind::LengthMismatch, "assignment and data lengths differ");
    }
    if (pair.size() < parameter_count(family) + 1) {
        throw Error(ErrorKind::DegenerateDesign,
                    "need at least " + std::to_string(parameter_count(family) + 1) + " points");
    }
    Range r = x_range(pair);
    if (r.lo == r.hi) throw Error(ErrorKind::DegenerateDesign, "all x values are identical");
}

double loss_value(kernels::LossKind kind, const SeriesPair& pair, std::span<const std::uint8_t> z,
                  const LossWeights& w, const ModelSpec& m, const Range& range) {
    if (m.coefficients.front() == 0.0 || !increasing_on(m, range.lo, range.hi)) return kInf;
    std::vector<double> terms(pair.size());
    kernels::parallel::loss_terms(kind, {pair.x, pair.y, z}, m, w, terms);
    return pairwise_sum(terms);
}

bool needs_clamp(const SeriesPair& pair, std::span<const std::uint8_t> z, const ModelSpec& m,
                 bool all_points) {
    for (std::size_t i = 0; i < pair.size(); ++i) {
        if (!all_points && z[i]) continue;
        if (inverse_clamped(m, pair.y[i]).deficit > 0.0) return true;
    }
    return false;
}

// Starting points used when the OLS fit itself is not a valid increasing model.
std::vector<ModelSpec> fallback_starts(const SeriesPair& pair, Family family) {
    std::vector<ModelSpec> starts;
    Eigen::MatrixXd A(static_cast<Eigen::Index>(pair.size()), 2);
    Eigen::VectorXd xv(static_cast<Eigen::Index>(pair.size()));
    for (std::size_t i = 0; i < pair.size(); ++i) {
        auto r = static_cast<Eigen::Index>(i);
        A(r, 0) = pair.y[i];
        A(r, 1) = 1.0;
        xv(r) = pair.x[i];
    }
    // Regression of X on Y, inverted into y = a x + b.
    Eigen::Vector2d cd = A.colPivHouseholderQr().solve(xv);
    if (cd(0) > 0.0) {
        double a = 1.0 / cd(0);
        double b = -cd(1) / cd(0);
        if (family == Family::Linear) {
            starts.push_back(ModelSpec::linear(a, b));
        } else {
            Range r = x_range(pair);
            double span = std::max(std::abs(r.hi), std::abs(r.lo));
            starts.push_back(ModelSpec::quadratic(1e-3 * a / std::max(span, 1e-12), a, b));
        }
    }
    if (family == Family::Quadratic) {
        ModelSpec lin = ols_fit(pair, Family::Linear);
        if (lin.coefficients[0] > 0.0) {
            Range r = x_range(pair);
            double span = std::max(std::abs(r.hi), std::abs(r.lo));
            double a = 1e-3 * lin.coefficients[0] / std::max(span, 1e-12);
            starts.push_back(ModelSpec::quadratic(a, lin.coefficients[0], lin.coefficients[1]));
        }
    }
    return starts;
}

}  // namespace

const char* to_string(Family family) {
    return family == Family::Linear ? "linear" : "quadratic";
}

Family parse_family(const std::string& text) {
    if (text == "linear") return Family::Linear;
    if (text == "quadratic") return Family::Quadratic;
    throw Error(ErrorKind::InvalidArgument, "unknown family '" + text + "'");
}

std::size_t parameter_count(Family family) {
    return family == Family::Linear ? 2 : 3;
}

void validate(const ModelSpec& m) {
    if (m.coefficients.size() != parameter_count(m.family)) {
        throw Error(ErrorKind::InvalidArgument, std::string(to_string(m.family)) + " model needs "
                                                    + std::to_string(parameter_count(m.family))
                                                    + " coefficients");
    }
    if (m.coefficients[0] == 0.0) throw Error(ErrorKind::InvalidArgument, "leading coefficient is zero");
    for (double c : m.coefficients) {
        if (!std::isfinite(c)) throw Error(ErrorKind::InvalidArgument, "non-finite coefficient");
    }
}

double forward(const ModelSpec& m, double x) {
    const auto& c = m.coefficients;
    if (m.family == Family::Linear) return c[0] * x + c[1];
    return (c[0] * x + c[1]) * x + c[2];
}

ClampedInverse inverse_clamped(const ModelSpec& m, double y) {
    const auto& c = m.coefficients;
    if (m.family == Family::Linear) return {(y - c[1]) / c[0], 0.0};
    const double a = c[0], b = c[1];
    const double dy = y - c[2];
    double disc = b * b + 4.0 * a * dy;
    double deficit = 0.0;
    if (disc < 0.0) {
        deficit = -disc;
        disc = 0.0;
    }
    const double root = std::sqrt(disc);
    // (-b + root) / 2a picks the increasing branch for either sign of a; the
    // rationalised form avoids cancellation when b > 0.
    double x = (b >= 0.0 && b + root != 0.0) ? 2.0 * dy / (b + root) : (root - b) / (2.0 * a);
    if (deficit > 0.0) x = -b / (2.0 * a);
    return {x, deficit};
}

double inverse(const ModelSpec& m, double y) {
    ClampedInverse r = inverse_clamped(m, y);
    if (r.deficit > 0.0) {
        throw Error(ErrorKind::InverseDomain, "y = " + std::to_string(y) + " is below the branch minimum");
    }
    return r.value;
}

bool increasing_on(const ModelSpec& m, double lo, double hi) {
    const auto& c = m.coefficients;
    if (m.family == Family::Linear) return c[0] > 0.0;
    if (c[0] == 0.0) return false;
    // g' is linear, so checking both ends suffices.
    return 2.0 * c[0] * lo + c[1] > 0.0 && 2.0 * c[0] * hi + c[1] > 0.0;
}

double gmm_loss(const SeriesPair& pair, std::span<const std::uint8_t> z, const LossWeights& w,
                const ModelSpec& m) {
    return loss_value(kernels::LossKind::Gmm, pair, z, w, m, x_range(pair));
}

double beta_loss(const SeriesPair& pair, std::span<const std::uint8_t> z, const LossWeights& w,
                 const ModelSpec& m) {
    return loss_value(kernels::LossKind::Beta, pair, z, w, m, x_range(pair));
}

ModelSpec ols_fit(const SeriesPair& pair, Family family) {
    const std::size_t p = parameter_count(family);
    if (pair.size() < p) throw Error(ErrorKind::DegenerateDesign, "too few points for OLS");
    const auto n = static_cast<Eigen::Index>(pair.size());
    Eigen::MatrixXd A(n, static_cast<Eigen::Index>(p));
    Eigen::VectorXd yv(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double x = pair.x[static_cast<std::size_t>(i)];
        if (family == Family::Linear) {
            A(i, 0) = x;
            A(i, 1) = 1.0;
        } else {
            A(i, 0) = x * x;
            A(i, 1) = x;
            A(i, 2) = 1.0;
        }
        yv(i) = pair.y[static_cast<std::size_t>(i)];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < static_cast<Eigen::Index>(p)) {
        throw Error(ErrorKind::DegenerateDesign, "design matrix is rank deficient");
    }
    Eigen::VectorXd coef = qr.solve(yv);
    ModelSpec m{family, std::vector<double>(coef.data(), coef.data() + coef.size())};
    return m;
}

ModelSpec fit_gmm_loss(const SeriesPair& pair, std::span<const std::uint8_t> z,
                       const LossWeights& w, Family family, std::span<const ModelSpec> extra_starts) {
    check_inputs(pair, z, family);
    const Range range = x_range(pair);

    auto objective = [&](std::span<const double> c) {
        ModelSpec m{family, std::vector<double>(c.begin(), c.end())};
        return loss_value(kernels::LossKind::Gmm, pair, z, w, m, range);
    };
    auto residuals = [&](std::span<const double> c, std::vector<double>& r) {
        ModelSpec m{family, std::vector<double>(c.begin(), c.end())};
        if (m.coefficients[0] == 0.0 || !increasing_on(m, range.lo, range.hi)) return false;
        r.resize(pair.size());
        const double s0 = std::sqrt(w.sigma0_sq), s1 = std::sqrt(w.sigma1_sq);
        for (std::size_t i = 0; i < pair.size(); ++i) {
            if (z[i]) {
                r[i] = (pair.y[i] - forward(m, pair.x[i])) / s1;
            } else {
                ClampedInverse inv = inverse_clamped(m, pair.y[i]);
                if (inv.deficit > 0.0) return false;
                r[i] = (pair.x[i] - inv.value) / s0;
            }
        }
        return true;
    };

    struct Candidate {
        ModelSpec model;
        double loss = kInf;
    };
    auto search_from = [&](const ModelSpec& start) -> Candidate {
        double start_loss = objective(start.coefficients);
        if (!std::isfinite(start_loss)) return {};
        SimplexResult nm = nelder_mead(objective, start.coefficients);
        Candidate best{start, start_loss};
        if (nm.value < best.loss) best = {ModelSpec{family, nm.x}, nm.value};
        PolishResult pol = polish_least_squares(residuals, best.model.coefficients);
        if (std::isfinite(pol.value)) {
            double polished = objective(pol.x);
            if (polished <= best.loss) best = {ModelSpec{family, pol.x}, polished};
        }
        return best;
    };

    std::vector<ModelSpec> starts;
    try {
        starts.push_back(ols_fit(pair, family));
    } catch (const Error&) {
        // Rank-deficient quadratic design: fall through to the linear-based starts.
    }
    for (const auto& s : extra_starts) {
        if (s.family == family) starts.push_back(s);
    }

    auto pick = [&](const std::vector<ModelSpec>& from) {
        Candidate best;
        for (const auto& s : from) {
            Candidate c = search_from(s);
            if (!std::isfinite(c.loss) || needs_clamp(pair, z, c.model, false)) continue;
            if (c.loss < best.loss) best = std::move(c);
        }
        return best;
    };

    Candidate best = pick(starts);
    if (!std::isfinite(best.loss)) best = pick(fallback_starts(pair, family));
    if (!std::isfinite(best.loss)) {
        throw Error(ErrorKind::NonMonotoneFit, "no increasing model found for this assignment");
    }
    return best.model;
}

ModelSpec fit_beta_loss(const SeriesPair& pair, std::span<const std::uint8_t> z,
                        const LossWeights& w, Family family, const ModelSpec& init) {
    check_inputs(pair, z, family);
    validate(init);
    if (init.family != family) throw Error(ErrorKind::InvalidArgument, "init family mismatch");
    const Range range = x_range(pair);

    SimplexOptions opt;
    for (double c : init.coefficients) {
        double half = c != 0.0 ? kTrustRegionFraction * std::abs(c) : kTrustRegionFraction;
        opt.lower.push_back(c - half);
        opt.upper.push_back(c + half);
    }
    auto objective = [&](std::span<const double> c) {
        ModelSpec m{family, std::vector<double>(c.begin(), c.end())};
        return loss_value(kernels::LossKind::Beta, pair, z, w, m, range);
    };
    if (!std::isfinite(objective(init.coefficients))) {
        throw Error(ErrorKind::NonMonotoneFit, "beta search start is not an increasing model");
    }
    SimplexResult nm = nelder_mead(objective, init.coefficients, opt);
    ModelSpec m{family, nm.x};
    if (nm.value > objective(init.coefficients)) m = init;

    for (std::size_t k = 0; k < m.coefficients.size(); ++k) {
        double width = opt.upper[k] - opt.lower[k];
        double tol = 1e-9 * width;
        if (m.coefficients[k] - opt.lower[k] <= tol || opt.upper[k] - m.coefficients[k] <= tol) {
            throw Error(ErrorKind::TrustRegionExhausted,
                        "coefficient " + std::to_string(k) + " reached the trust-region boundary");
        }
    }
    if (needs_clamp(pair, z, m, true)) {
        throw Error(ErrorKind::NonMonotoneFit, "beta fit leaves observations outside the inverse domain");
    }
    return m;
}

}  // namespace swapfit
