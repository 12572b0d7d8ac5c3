#pragma once

#include <cstddef>
#include <span>

namespace swapfit {

struct RateEstimate {
    double lambda = 1.0;
    std::size_t n = 0;

    double log_density(double v) const;
};

struct KsResult {
    double d_statistic = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

// lambda = 1 / mean. Throws NonPositiveSample on empty input or any value <= 0.
RateEstimate fit_exponential(std::span<const double> sample);

// One-sample K-S against Exponential(lambda). The p-value uses the asymptotic
// Kolmogorov series, which is not exact when lambda was estimated from the
// same sample.
KsResult ks_test_exponential(std::span<const double> sample, double lambda);

// 2 * sum_{k>=1} (-1)^(k-1) exp(-2 k^2 n d^2), clamped to [0, 1].
double kolmogorov_p_value(double d, std::size_t n);

// log10 of the same quantity, finite even when the p-value underflows.
double kolmogorov_log10_p_value(double d, std::size_t n);

struct MarginalDensities {
    RateEstimate x;
    RateEstimate y;
};

}  // namespace swapfit
