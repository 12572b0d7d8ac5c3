#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "swapfit/densities.hpp"
#include "swapfit/model.hpp"
#include "swapfit/series.hpp"

namespace swapfit {

enum class Variant { Gmm, Beta };

const char* to_string(Variant v);
Variant parse_variant(const std::string& text);

struct SwapConfig {
    Variant variant = Variant::Gmm;
    Family family = Family::Linear;
    double tol_g = 1e-8;
    int max_iters = 500;
    int restarts = 20;
    std::uint64_t seed = 42;
    double variance_floor = 1e-12;
};

void validate(const SwapConfig& cfg);

struct SwapState {
    Assignment z;
    ModelSpec model;
    double sigma0_sq = 1.0;
    double sigma1_sq = 1.0;
    double pi0 = 0.5;
    double pi1 = 0.5;
    std::size_t n0 = 0;
    std::size_t n1 = 0;
    int iteration = 0;
};

struct Posterior {
    double p0 = 0.5;
    double p1 = 0.5;
};

enum class StopReason { ZFixedPoint, GTolerance, MaxIters };
const char* to_string(StopReason r);

struct SwapFit {
    SwapState final;
    std::vector<Posterior> posteriors;
    std::vector<double> objective_trace;  // one entry per iteration
    double initial_objective = 0.0;
    double objective = 0.0;               // final GMM log-likelihood or beta loss
    StopReason stop_reason = StopReason::MaxIters;
    int restart_index_chosen = 0;
    // A variance floor, pi clamp or empty-group carry-over fired at least once.
    bool clamp_fired = false;
    // Final objective per restart; NaN for restarts that failed.
    std::vector<double> restart_objectives;
    SwapConfig config;
};

// Per-iteration random stream for restart `restart` of a run seeded with `seed`.
std::mt19937_64 restart_stream(std::uint64_t seed, int restart);

SwapState initialize(const SeriesPair& pair, const SwapConfig& cfg,
                     const MarginalDensities& densities, std::mt19937_64& rng);

// Unnormalised log-weights of Z = 1 and Z = 0 for one observation.
struct LogWeights {
    double log_w1 = 0.0;
    double log_w0 = 0.0;
};
LogWeights log_weights(double x, double y, const SwapState& s, const MarginalDensities& densities);

// Normalises in log space with max-subtraction. A -inf Z = 0 weight (inverse
// undefined) gives p1 = 1.
Posterior normalize(const LogWeights& w);

Posterior posterior_z(double x, double y, const SwapState& s, const MarginalDensities& densities);

std::vector<Posterior> posteriors(const SeriesPair& pair, const SwapState& s,
                                  const MarginalDensities& densities);

// z_i = 1 iff p1 >= p0, all points from the same state.
Assignment assign_z(const SeriesPair& pair, const SwapState& s, const MarginalDensities& densities);

ModelSpec update_model(const SeriesPair& pair, const Assignment& z, const SwapState& s,
                       const SwapConfig& cfg);

struct Variances {
    double sigma0_sq = 1.0;
    double sigma1_sq = 1.0;
    bool clamped = false;  // floor hit or empty group kept its previous value
};

// Mean squared residual per group (the zero-mean Gaussian MLE).
Variances update_variances(const SeriesPair& pair, const Assignment& z, const ModelSpec& m,
                           double floor, double previous_sigma0_sq, double previous_sigma1_sq);

struct Mixing {
    std::size_t n0 = 0;
    std::size_t n1 = 0;
    double pi0 = 0.5;
    double pi1 = 0.5;
    bool clamped = false;
};

// pi0 = n0/n clamped to [1/(n+1), n/(n+1)].
Mixing update_mixing(const Assignment& z);

double complete_log_likelihood(const SeriesPair& pair, const SwapState& s,
                               const MarginalDensities& densities);

// Objective used to compare restarts: log-likelihood (GMM) or beta loss.
double swap_objective(Variant variant, const SeriesPair& pair, const SwapState& s,
                      const MarginalDensities& densities);

// true when `candidate` is strictly better than `incumbent` for this variant.
bool objective_better(Variant variant, double candidate, double incumbent);

SwapFit run_swap(const SeriesPair& pair, const SwapConfig& cfg, const MarginalDensities& densities);

// A single restart; exposed for tests and for the oracle comparison.
SwapFit run_single_restart(const SeriesPair& pair, const SwapConfig& cfg,
                           const MarginalDensities& densities, int restart);

}  // namespace swapfit
