#include "swapfit/swap.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>

#include "swapfit/error.hpp"
#include "swapfit/kernels.hpp"
#include "swapfit/summation.hpp"

namespace swapfit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

kernels::PosteriorParams posterior_params(const SwapState& s, const MarginalDensities& d) {
    return {s.sigma0_sq, s.sigma1_sq, std::log(s.pi0), std::log(s.pi1), d.x.lambda, d.y.lambda};
}

double coefficient_distance(const ModelSpec& a, const ModelSpec& b) {
    double sq = 0.0;
    for (std::size_t k = 0; k < a.coefficients.size(); ++k) {
        double diff = a.coefficients[k] - b.coefficients[k];
        sq += diff * diff;
    }
    return std::sqrt(sq);
}

// Log-likelihood that reports -inf instead of throwing when a Z = 0 point has
// no inverse; used for trace entries of intermediate states.
double safe_objective(Variant variant, const SeriesPair& pair, const SwapState& s,
                      const MarginalDensities& d) {
    try {
        return swap_objective(variant, pair, s, d);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::InverseDomain) throw;
        return variant == Variant::Gmm ? kNegInf : std::numeric_limits<double>::infinity();
    }
}

}  // namespace

const char* to_string(Variant v) {
    return v == Variant::Gmm ? "gmm" : "beta";
}

Variant parse_variant(const std::string& text) {
    if (text == "gmm") return Variant::Gmm;
    if (text == "beta") return Variant::Beta;
    throw Error(ErrorKind::InvalidArgument, "unknown variant '" + text + "'");
}

const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::ZFixedPoint: return "z_fixed_point";
        case StopReason::GTolerance: return "g_tolerance";
        case StopReason::MaxIters: return "max_iters";
    }
    return "unknown";
}

void validate(const SwapConfig& cfg) {
    if (!(cfg.tol_g > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
    if (cfg.max_iters < 1) throw Error(ErrorKind::InvalidArgument, "max_iters must be at least 1");
    if (cfg.restarts < 1) throw Error(ErrorKind::InvalidArgument, "restarts must be at least 1");
    if (!(cfg.variance_floor > 0.0)) throw Error(ErrorKind::InvalidArgument, "variance floor must be positive");
}

std::mt19937_64 restart_stream(std::uint64_t seed, int restart) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(restart)};
    return std::mt19937_64(seq);
}

SwapState initialize(const SeriesPair& pair, const SwapConfig& cfg,
                     const MarginalDensities& densities, std::mt19937_64& rng) {
    (void)densities;
    const std::size_t n = pair.size();
    SwapState s;
    s.z.resize(n);
    for (auto& zi : s.z) zi = static_cast<std::uint8_t>(rng() >> 63);
    s.model = ols_fit(pair, cfg.family);

    // Residual variances of the initial assignment; an empty group borrows the
    // all-points variance of its route.
    double ss0 = 0.0, ss1 = 0.0, all0 = 0.0, all1 = 0.0;
    std::size_t n0 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double e1 = pair.y[i] - forward(s.model, pair.x[i]);
        double e0 = pair.x[i] - inverse_clamped(s.model, pair.y[i]).value;
        all0 += e0 * e0;
        all1 += e1 * e1;
        if (s.z[i]) {
            ss1 += e1 * e1;
        } else {
            ss0 += e0 * e0;
            ++n0;
        }
    }
    const std::size_t n1 = n - n0;
    s.sigma0_sq = n0 ? ss0 / static_cast<double>(n0) : all0 / static_cast<double>(n);
    s.sigma1_sq = n1 ? ss1 / static_cast<double>(n1) : all1 / static_cast<double>(n);
    s.sigma0_sq = std::max(s.sigma0_sq, cfg.variance_floor);
    s.sigma1_sq = std::max(s.sigma1_sq, cfg.variance_floor);
    Mixing mix = update_mixing(s.z);
    s.n0 = mix.n0;
    s.n1 = mix.n1;
    s.pi0 = mix.pi0;
    s.pi1 = mix.pi1;
    s.iteration = 0;
    return s;
}

LogWeights log_weights(double x, double y, const SwapState& s, const MarginalDensities& densities) {
    LogWeights w;
    kernels::serial::log_weights(std::span(&x, 1), std::span(&y, 1), s.model,
                                 posterior_params(s, densities), std::span(&w.log_w1, 1),
                                 std::span(&w.log_w0, 1));
    return w;
}

Posterior normalize(const LogWeights& w) {
    if (w.log_w0 == kNegInf) return {0.0, 1.0};
    if (w.log_w1 == kNegInf) return {1.0, 0.0};
    double top = std::max(w.log_w0, w.log_w1);
    double a = std::exp(w.log_w1 - top);
    double b = std::exp(w.log_w0 - top);
    double total = a + b;
    return {b / total, a / total};
}

Posterior posterior_z(double x, double y, const SwapState& s, const MarginalDensities& densities) {
    return normalize(log_weights(x, y, s, densities));
}

std::vector<Posterior> posteriors(const SeriesPair& pair, const SwapState& s,
                                  const MarginalDensities& densities) {
    const std::size_t n = pair.size();
    std::vector<double> w1(n), w0(n);
    kernels::parallel::log_weights(pair.x, pair.y, s.model, posterior_params(s, densities), w1, w0);
    std::vector<Posterior> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = normalize({w1[i], w0[i]});
    return out;
}

Assignment assign_z(const SeriesPair& pair, const SwapState& s, const MarginalDensities& densities) {
    const std::size_t n = pair.size();
    std::vector<double> w1(n), w0(n);
    kernels::parallel::log_weights(pair.x, pair.y, s.model, posterior_params(s, densities), w1, w0);
    Assignment z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = w1[i] >= w0[i] ? 1 : 0;
    return z;
}

ModelSpec update_model(const SeriesPair& pair, const Assignment& z, const SwapState& s,
                       const SwapConfig& cfg) {
    LossWeights w{s.sigma0_sq, s.sigma1_sq};
    ModelSpec previous = s.model;
    ModelSpec gmm = fit_gmm_loss(pair, z, w, cfg.family, std::span(&previous, 1));
    if (cfg.variant == Variant::Gmm) return gmm;
    return fit_beta_loss(pair, z, w, cfg.family, gmm);
}

Variances update_variances(const SeriesPair& pair, const Assignment& z, const ModelSpec& m,
                           double floor, double previous_sigma0_sq, double previous_sigma1_sq) {
    std::vector<double> sq0, sq1;
    for (std::size_t i = 0; i < pair.size(); ++i) {
        if (z[i]) {
            double e = pair.y[i] - forward(m, pair.x[i]);
            sq1.push_back(e * e);
        } else {
            double e = pair.x[i] - inverse(m, pair.y[i]);
            sq0.push_back(e * e);
        }
    }
    Variances v;
    auto group = [&](const std::vector<double>& sq, double previous, double& out) {
        if (sq.empty()) {
            out = previous;
            v.clamped = true;
            return;
        }
        out = pairwise_sum(sq) / static_cast<double>(sq.size());
        if (out < floor) {
            out = floor;
            v.clamped = true;
        }
    };
    group(sq0, previous_sigma0_sq, v.sigma0_sq);
    group(sq1, previous_sigma1_sq, v.sigma1_sq);
    return v;
}

Mixing update_mixing(const Assignment& z) {
    Mixing m;
    const std::size_t n = z.size();
    for (auto zi : z) (zi ? m.n1 : m.n0) += 1;
    const double dn = static_cast<double>(n);
    m.pi0 = static_cast<double>(m.n0) / dn;
    const double lo = 1.0 / (dn + 1.0), hi = dn / (dn + 1.0);
    if (m.pi0 < lo || m.pi0 > hi) {
        m.pi0 = std::clamp(m.pi0, lo, hi);
        m.clamped = true;
    }
    m.pi1 = 1.0 - m.pi0;
    return m;
}

double complete_log_likelihood(const SeriesPair& pair, const SwapState& s,
                               const MarginalDensities& densities) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> terms(pair.size());
    const double log_pi0 = std::log(s.pi0), log_pi1 = std::log(s.pi1);
    const double norm0 = 0.5 * std::log(two_pi * s.sigma0_sq);
    const double norm1 = 0.5 * std::log(two_pi * s.sigma1_sq);
    for (std::size_t i = 0; i < pair.size(); ++i) {
        const double x = pair.x[i], y = pair.y[i];
        if (s.z[i]) {
            double e = y - forward(s.model, x);
            terms[i] = log_pi1 - norm1 - e * e / (2.0 * s.sigma1_sq) + densities.x.log_density(x);
        } else {
            double e = x - inverse(s.model, y);
            terms[i] = log_pi0 - norm0 - e * e / (2.0 * s.sigma0_sq) + densities.y.log_density(y);
        }
    }
    return pairwise_sum(terms);
}

double swap_objective(Variant variant, const SeriesPair& pair, const SwapState& s,
                      const MarginalDensities& densities) {
    if (variant == Variant::Gmm) return complete_log_likelihood(pair, s, densities);
    return beta_loss(pair, s.z, {s.sigma0_sq, s.sigma1_sq}, s.model);
}

bool objective_better(Variant variant, double candidate, double incumbent) {
    return variant == Variant::Gmm ? candidate > incumbent : candidate < incumbent;
}

SwapFit run_single_restart(const SeriesPair& pair, const SwapConfig& cfg,
                           const MarginalDensities& densities, int restart) {
    std::mt19937_64 rng = restart_stream(cfg.seed, restart);
    SwapFit fit;
    fit.config = cfg;
    fit.restart_index_chosen = restart;
    SwapState s = initialize(pair, cfg, densities, rng);
    fit.initial_objective = safe_objective(cfg.variant, pair, s, densities);

    for (int it = 0; it < cfg.max_iters; ++it) {
        Assignment z = assign_z(pair, s, densities);
        ModelSpec m = update_model(pair, z, s, cfg);
        Variances v = update_variances(pair, z, m, cfg.variance_floor, s.sigma0_sq, s.sigma1_sq);
        Mixing mix = update_mixing(z);
        fit.clamp_fired = fit.clamp_fired || v.clamped || mix.clamped;

        const bool z_same = z == s.z;
        const double dg = coefficient_distance(m, s.model);

        s.z = std::move(z);
        s.model = std::move(m);
        s.sigma0_sq = v.sigma0_sq;
        s.sigma1_sq = v.sigma1_sq;
        s.n0 = mix.n0;
        s.n1 = mix.n1;
        s.pi0 = mix.pi0;
        s.pi1 = mix.pi1;
        s.iteration = it + 1;
        fit.objective_trace.push_back(safe_objective(cfg.variant, pair, s, densities));

        if (dg < cfg.tol_g) {
            fit.stop_reason = z_same ? StopReason::ZFixedPoint : StopReason::GTolerance;
            break;
        }
        fit.stop_reason = StopReason::MaxIters;
    }
    fit.objective = fit.objective_trace.back();
    fit.posteriors = posteriors(pair, s, densities);
    fit.final = std::move(s);
    return fit;
}

SwapFit run_swap(const SeriesPair& pair, const SwapConfig& cfg, const MarginalDensities& densities) {
    validate(cfg);
    const int restarts = cfg.restarts;
    std::vector<SwapFit> fits(static_cast<std::size_t>(restarts));
    std::vector<char> ok(static_cast<std::size_t>(restarts), 0);
    std::vector<std::exception_ptr> fatal(static_cast<std::size_t>(restarts));
    std::vector<std::string> failures(static_cast<std::size_t>(restarts));

#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < restarts; ++r) {
        const auto idx = static_cast<std::size_t>(r);
        try {
            fits[idx] = run_single_restart(pair, cfg, densities, r);
            ok[idx] = 1;
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::NonMonotoneFit || e.kind() == ErrorKind::TrustRegionExhausted) {
                failures[idx] = e.what();
            } else {
                fatal[idx] = std::current_exception();
            }
        } catch (...) {
            fatal[idx] = std::current_exception();
        }
    }
    for (const auto& f : fatal) {
        if (f) std::rethrow_exception(f);
    }

    int best = -1;
    std::vector<double> objectives(static_cast<std::size_t>(restarts),
                                   std::numeric_limits<double>::quiet_NaN());
    for (int r = 0; r < restarts; ++r) {
        const auto idx = static_cast<std::size_t>(r);
        if (!ok[idx]) continue;
        objectives[idx] = fits[idx].objective;
        if (best < 0 || objective_better(cfg.variant, fits[idx].objective,
                                         fits[static_cast<std::size_t>(best)].objective)) {
            best = r;
        }
    }
    if (best < 0) {
        throw Error(ErrorKind::AllRestartsFailed,
                    std::to_string(restarts) + " restarts failed; first: " + failures.front());
    }
    SwapFit chosen = std::move(fits[static_cast<std::size_t>(best)]);
    chosen.restart_objectives = std::move(objectives);
    return chosen;
}

}  // namespace swapfit
