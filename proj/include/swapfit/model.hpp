#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "swapfit/series.hpp"

namespace swapfit {

enum class Family { Linear, Quadratic };

const char* to_string(Family family);
Family parse_family(const std::string& text);

// g(x) = a*x + b (Linear) or a*x^2 + b*x + c (Quadratic). A quadratic is
// restricted to its increasing branch, where g'(x) = 2ax + b >= 0, which makes
// it a bijection onto its image.
struct ModelSpec {
    Family family = Family::Linear;
    std::vector<double> coefficients;

    static ModelSpec linear(double a, double b) { return {Family::Linear, {a, b}}; }
    static ModelSpec quadratic(double a, double b, double c) {
        return {Family::Quadratic, {a, b, c}};
    }

    std::size_t parameter_count() const { return coefficients.size(); }
    bool operator==(const ModelSpec&) const = default;
};

std::size_t parameter_count(Family family);

// Throws InvalidArgument on wrong arity or a == 0.
void validate(const ModelSpec& m);

double forward(const ModelSpec& m, double x);

// Increasing-branch inverse. Throws InverseDomain when y lies below the branch
// minimum of a quadratic.
double inverse(const ModelSpec& m, double y);

// Inverse with the square-root argument clamped at zero; `deficit` is the
// magnitude that was clamped away (0 when y is in range).
struct ClampedInverse {
    double value = 0.0;
    double deficit = 0.0;
};
ClampedInverse inverse_clamped(const ModelSpec& m, double y);

// True when g is strictly increasing over [lo, hi].
bool increasing_on(const ModelSpec& m, double lo, double hi);

struct LossWeights {
    double sigma0_sq = 1.0;
    double sigma1_sq = 1.0;
};

// One byte per observation; 1 means X is explanatory.
using Assignment = std::vector<std::uint8_t>;

// Penalty factor applied per unit of clamped discriminant, divided by sigma0^2.
inline constexpr double kClampPenalty = 1e3;

// Variance-weighted squared residuals summed over both groups. Returns +inf
// for a model that is not increasing over the data's x-range; clamped
// inverses are penalised.
double gmm_loss(const SeriesPair& pair, std::span<const std::uint8_t> z, const LossWeights& w,
                const ModelSpec& m);

// Signed separation loss: each group's own residual minus the other route's.
double beta_loss(const SeriesPair& pair, std::span<const std::uint8_t> z, const LossWeights& w,
                 const ModelSpec& m);

// Ordinary least squares of Y on X (polynomial of the family's degree).
ModelSpec ols_fit(const SeriesPair& pair, Family family);

// Minimises gmm_loss by simplex search followed by a residual-space
// Gauss-Newton polish. Searches start from the OLS fit plus any `extra_starts`;
// the lowest loss wins.
ModelSpec fit_gmm_loss(const SeriesPair& pair, std::span<const std::uint8_t> z,
                       const LossWeights& w, Family family,
                       std::span<const ModelSpec> extra_starts = {});

// Box-constrained simplex search on beta_loss inside +-50% of each `init`
// coefficient. Throws TrustRegionExhausted when the minimiser sits on the box.
ModelSpec fit_beta_loss(const SeriesPair& pair, std::span<const std::uint8_t> z,
                        const LossWeights& w, Family family, const ModelSpec& init);

inline constexpr double kTrustRegionFraction = 0.5;

}  // namespace swapfit
