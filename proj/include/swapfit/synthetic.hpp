#pragma once

#include <cstdint>
#include <span>
#include <utility>

#include "swapfit/model.hpp"
#include "swapfit/series.hpp"
#include "swapfit/swap.hpp"

namespace swapfit {

struct SyntheticTruth {
    ModelSpec model = ModelSpec::linear(2.0, 1.0);
    Assignment z_true;  // empty: drawn as Bernoulli(pi1) per point
    double sigma0_sq = 0.0;
    double sigma1_sq = 0.0;
    std::uint64_t seed = 0;
    double pi1 = 0.5;
};

inline constexpr int kRejectionLimit = 100000;

// Z = 1: x ~ Exp(rate_x), y = g(x) + N(0, sigma1^2).
// Z = 0: y ~ Exp(rate_y) restricted to g([0, inf)), x = g^-1(y) + N(0, sigma0^2)
// restricted to x > 0.
// g must be increasing on [0, inf). Quarters start at 2000Q1. The returned
// truth carries the realised z_true.
std::pair<SeriesPair, SyntheticTruth> generate(const SyntheticTruth& truth, std::size_t n,
                                               double rate_x, double rate_y);

struct BruteForceResult {
    Assignment z;
    double objective = 0.0;  // complete-data log-likelihood
    SwapState state;
    std::size_t admissible = 0;  // assignments that were scored
};

inline constexpr std::size_t kBruteForceMax = 12;

// Best complete-data log-likelihood over every assignment. For each z the
// model and variances are refined alternately to a fixed point, starting from
// OLS. Assignments without any monotone fit are skipped.
BruteForceResult brute_force_best_assignment(const SeriesPair& pair, Family family,
                                             const MarginalDensities& densities,
                                             double variance_floor = 1e-12);

inline constexpr double kGridStep = 1e-3;
inline constexpr double kGridMax = 3.0;

// Grid maximiser of volodin_log_likelihood with gamma = n1/n.
std::pair<double, double> grid_mle_beta(std::span<const double> probs);

}  // namespace swapfit
