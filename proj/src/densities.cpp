#include "swapfit/densities.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "swapfit/error.hpp"
#include "swapfit/kernels.hpp"
#include "swapfit/summation.hpp"

namespace swapfit {

double RateEstimate::log_density(double v) const {
    return kernels::exponential_log_density(lambda, v);
}

RateEstimate fit_exponential(std::span<const double> sample) {
    if (sample.empty()) throw Error(ErrorKind::NonPositiveSample, "empty sample");
    for (double v : sample) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw Error(ErrorKind::NonPositiveSample, "value " + std::to_string(v));
        }
    }
    double mean = pairwise_sum(sample) / static_cast<double>(sample.size());
    return {1.0 / mean, sample.size()};
}

KsResult ks_test_exponential(std::span<const double> sample, double lambda) {
    if (sample.empty()) throw Error(ErrorKind::NonPositiveSample, "empty sample");
    if (!(lambda > 0.0)) throw Error(ErrorKind::NonPositiveSample, "lambda must be positive");
    for (double v : sample) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw Error(ErrorKind::NonPositiveSample, "value " + std::to_string(v));
        }
    }
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        double cdf = -std::expm1(-lambda * sorted[i]);
        double above = static_cast<double>(i + 1) / n - cdf;
        double below = cdf - static_cast<double>(i) / n;
        d = std::max({d, above, below});
    }
    return {d, kolmogorov_p_value(d, sorted.size()), sorted.size()};
}

double kolmogorov_p_value(double d, std::size_t n) {
    const double t = 2.0 * static_cast<double>(n) * d * d;
    if (t == 0.0) return 1.0;
    double sum = 0.0;
    for (int k = 1; k < 100000; ++k) {
        double term = std::exp(-t * k * k);
        if (term < 1e-300) break;
        sum += (k % 2 == 1 ? term : -term);
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double kolmogorov_log10_p_value(double d, std::size_t n) {
    double p = kolmogorov_p_value(d, n);
    if (p > 1e-200) return std::log10(p);
    // Deep tail: the leading term dominates.
    const double t = 2.0 * static_cast<double>(n) * d * d;
    return (std::log(2.0) - t) / std::log(10.0);
}

}  // namespace swapfit
