#include "swapfit/synthetic.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "swapfit/beta_gof.hpp"
#include "swapfit/error.hpp"

namespace swapfit {

namespace {

void require_increasing_from_zero(const ModelSpec& m) {
    validate(m);
    const auto& c = m.coefficients;
    const bool ok = m.family == Family::Linear ? c[0] > 0.0 : (c[0] > 0.0 && c[1] >= 0.0);
    if (!ok) throw Error(ErrorKind::InvalidArgument, "synthetic model must increase on [0, inf)");
}

}  // namespace

std::pair<SeriesPair, SyntheticTruth> generate(const SyntheticTruth& truth, std::size_t n,
                                               double rate_x, double rate_y) {
    if (!(rate_x > 0.0) || !(rate_y > 0.0)) throw Error(ErrorKind::InvalidArgument, "rates must be positive");
    if (truth.sigma0_sq < 0.0 || truth.sigma1_sq < 0.0) {
        throw Error(ErrorKind::InvalidArgument, "variances must be non-negative");
    }
    if (!truth.z_true.empty() && truth.z_true.size() != n) {
        throw Error(ErrorKind::LengthMismatch, "z_true has " + std::to_string(truth.z_true.size())
                                                   + " entries for n = " + std::to_string(n));
    }
    require_increasing_from_zero(truth.model);

    std::mt19937_64 rng(truth.seed);
    std::exponential_distribution<double> exp_x(rate_x), exp_y(rate_y);
    std::normal_distribution<double> noise0(0.0, std::sqrt(truth.sigma0_sq));
    std::normal_distribution<double> noise1(0.0, std::sqrt(truth.sigma1_sq));
    std::bernoulli_distribution coin(truth.pi1);
    const double y_min = forward(truth.model, 0.0);

    SyntheticTruth out_truth = truth;
    out_truth.z_true.resize(n);
    SeriesPair pair;
    pair.x.resize(n);
    pair.y.resize(n);
    pair.index.resize(n);
    const int base = QuarterIndex{2000, 1}.ordinal();

    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t zi = truth.z_true.empty() ? static_cast<std::uint8_t>(coin(rng)) : truth.z_true[i];
        out_truth.z_true[i] = zi;
        pair.index[i] = QuarterIndex::from_ordinal(base + static_cast<int>(i));
        if (zi) {
            const double x = exp_x(rng);
            pair.x[i] = x;
            pair.y[i] = forward(truth.model, x) + (truth.sigma1_sq > 0.0 ? noise1(rng) : 0.0);
            continue;
        }
        int attempts = 0;
        double y = exp_y(rng);
        while (y <= y_min) {
            if (++attempts >= kRejectionLimit) {
                throw Error(ErrorKind::RangeExhausted, "no draw of y inside the range of g");
            }
            y = exp_y(rng);
        }
        const double centre = inverse(truth.model, y);
        double x = centre + (truth.sigma0_sq > 0.0 ? noise0(rng) : 0.0);
        attempts = 0;
        while (!(x > 0.0)) {
            if (++attempts >= kRejectionLimit) {
                throw Error(ErrorKind::RangeExhausted, "no positive draw of x");
            }
            x = centre + noise0(rng);
        }
        pair.x[i] = x;
        pair.y[i] = y;
    }
    return {std::move(pair), std::move(out_truth)};
}

namespace {

constexpr int kInnerIters = 200;
constexpr double kInnerTol = 1e-12;

double max_abs_diff(const ModelSpec& a, const ModelSpec& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.coefficients.size(); ++i) {
        d = std::max(d, std::abs(a.coefficients[i] - b.coefficients[i]));
    }
    return d;
}

// Fixed point of (g, variances) for one assignment. False when no monotone fit exists.
bool score_assignment(const SeriesPair& pair, const Assignment& z, Family family, double floor,
                      SwapState& s) {
    s.z = z;
    s.model = ols_fit(pair, family);
    const Mixing mix = update_mixing(z);
    s.n0 = mix.n0;
    s.n1 = mix.n1;
    s.pi0 = mix.pi0;
    s.pi1 = mix.pi1;

    // Starting variances: group residual mean squares under OLS.
    Variances v = update_variances(pair, z, s.model, floor, 1.0, 1.0);
    if (mix.n0 == 0) v.sigma0_sq = 1.0;
    if (mix.n1 == 0) v.sigma1_sq = 1.0;
    s.sigma0_sq = v.sigma0_sq;
    s.sigma1_sq = v.sigma1_sq;

    for (int it = 0; it < kInnerIters; ++it) {
        ModelSpec m;
        try {
            const ModelSpec prev[1] = {s.model};
            m = fit_gmm_loss(pair, z, {s.sigma0_sq, s.sigma1_sq}, family, prev);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::NonMonotoneFit) return false;
            throw;
        }
        v = update_variances(pair, z, m, floor, s.sigma0_sq, s.sigma1_sq);
        const double dg = max_abs_diff(m, s.model);
        s.model = std::move(m);
        s.sigma0_sq = v.sigma0_sq;
        s.sigma1_sq = v.sigma1_sq;
        s.iteration = it + 1;
        if (dg < kInnerTol) break;
    }
    return true;
}

}  // namespace

BruteForceResult brute_force_best_assignment(const SeriesPair& pair, Family family,
                                             const MarginalDensities& densities,
                                             double variance_floor) {
    const std::size_t n = pair.size();
    if (n > kBruteForceMax) {
        throw Error(ErrorKind::TooLarge, "brute force limited to n <= " + std::to_string(kBruteForceMax));
    }
    const long total = 1L << n;
    std::vector<double> scores(static_cast<std::size_t>(total), -std::numeric_limits<double>::infinity());
    std::vector<SwapState> states(static_cast<std::size_t>(total));
    std::vector<char> scored(static_cast<std::size_t>(total), 0);
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(total));

#pragma omp parallel for schedule(dynamic)
    for (long mask = 0; mask < total; ++mask) {
        const auto idx = static_cast<std::size_t>(mask);
        Assignment z(n);
        for (std::size_t i = 0; i < n; ++i) z[i] = static_cast<std::uint8_t>((mask >> i) & 1L);
        try {
            SwapState s;
            if (!score_assignment(pair, z, family, variance_floor, s)) continue;
            scores[idx] = complete_log_likelihood(pair, s, densities);
            states[idx] = std::move(s);
            scored[idx] = 1;
        } catch (...) {
            errors[idx] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    BruteForceResult best;
    best.objective = -std::numeric_limits<double>::infinity();
    long best_mask = -1;
    for (long mask = 0; mask < total; ++mask) {
        const auto idx = static_cast<std::size_t>(mask);
        if (!scored[idx]) continue;
        ++best.admissible;
        if (best_mask < 0 || scores[idx] > best.objective) {
            best.objective = scores[idx];
            best_mask = mask;
        }
    }
    if (best_mask < 0) throw Error(ErrorKind::NonMonotoneFit, "no assignment admits a monotone fit");
    best.state = states[static_cast<std::size_t>(best_mask)];
    best.z = best.state.z;
    return best;
}

std::pair<double, double> grid_mle_beta(std::span<const double> probs) {
    std::size_t n0 = 0, n1 = 0;
    for (double p : probs) (p <= 0.5 ? n0 : n1) += 1;
    if (n0 == 0 || n1 == 0) throw Error(ErrorKind::AllOneSided, "grid MLE needs both groups");
    const double gamma = static_cast<double>(n1) / static_cast<double>(probs.size());
    const int steps = static_cast<int>(std::lround(kGridMax / kGridStep));

    // With gamma fixed the log-likelihood is a sum of an alpha-only and a
    // beta-only part, so two one-dimensional sweeps find the joint maximiser.
    auto sweep = [&](bool vary_alpha, double other) {
        double best_v = 0.0, best_ll = -std::numeric_limits<double>::infinity();
        for (int i = 1; i <= steps; ++i) {
            const double v = i * kGridStep;
            const double ll = vary_alpha ? volodin_log_likelihood(probs, v, other, gamma)
                                         : volodin_log_likelihood(probs, other, v, gamma);
            if (ll > best_ll) {
                best_ll = ll;
                best_v = v;
            }
        }
        return best_v;
    };
    const double alpha = sweep(true, 1.0);
    const double beta = sweep(false, alpha);
    return {alpha, beta};
}

}  // namespace swapfit
