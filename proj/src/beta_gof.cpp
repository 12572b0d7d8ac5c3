#include "swapfit/beta_gof.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "swapfit/error.hpp"
#include "swapfit/summation.hpp"

namespace swapfit {

namespace {

void check_shape(double x, double alpha, double beta) {
    if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorKind::DomainError, "x = " + std::to_string(x));
    if (!(alpha > 0.0) || !(beta > 0.0)) {
        throw Error(ErrorKind::DomainError, "shape parameters must be positive");
    }
}

double clamp_probability(double p, std::size_t& clamps) {
    if (p < kProbabilityClamp) {
        ++clamps;
        return kProbabilityClamp;
    }
    if (p > 1.0 - kProbabilityClamp) {
        ++clamps;
        return 1.0 - kProbabilityClamp;
    }
    return p;
}

}  // namespace

double volodin_cdf(double x, double alpha, double beta) {
    check_shape(x, alpha, beta);
    const double gamma = alpha / (alpha + beta);
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    if (x <= 0.5) return (1.0 - gamma) * std::pow(x / (1.0 - x), alpha);
    return 1.0 - gamma * std::pow((1.0 - x) / x, beta);
}

double volodin_pdf(double x, double alpha, double beta) {
    check_shape(x, alpha, beta);
    if (x == 0.0 || x == 1.0) throw Error(ErrorKind::DomainError, "density undefined at the endpoints");
    const double gamma = alpha / (alpha + beta);
    if (x <= 0.5) {
        return (1.0 - gamma) * alpha * std::pow(x / (1.0 - x), alpha - 1.0) / ((1.0 - x) * (1.0 - x));
    }
    return gamma * beta * std::pow((1.0 - x) / x, beta - 1.0) / (x * x);
}

double volodin_log_likelihood(std::span<const double> probs, double alpha, double beta, double gamma) {
    std::size_t clamps = 0;
    std::vector<double> terms;
    terms.reserve(probs.size());
    for (double raw : probs) {
        double p = clamp_probability(raw, clamps);
        if (p <= 0.5) {
            terms.push_back(std::log((1.0 - gamma) / ((1.0 - p) * (1.0 - p))) + std::log(alpha)
                            + (alpha - 1.0) * std::log(p / (1.0 - p)));
        } else {
            terms.push_back(std::log(gamma / (p * p)) + std::log(beta)
                            + (beta - 1.0) * std::log((1.0 - p) / p));
        }
    }
    return pairwise_sum(terms);
}

GofReport fit_alpha_beta(std::span<const double> probs) {
    GofReport r;
    std::vector<double> log_odds0, log_odds1;
    for (double raw : probs) {
        if (!(raw >= 0.0 && raw <= 1.0)) {
            throw Error(ErrorKind::DomainError, "probability " + std::to_string(raw));
        }
        auto bin = std::min(static_cast<std::size_t>(raw * kHistogramBins), kHistogramBins - 1);
        ++r.histogram[bin];
        double p = clamp_probability(raw, r.clamp_count);
        if (p <= 0.5) {
            log_odds0.push_back(std::log((1.0 - p) / p));
        } else {
            log_odds1.push_back(std::log(p / (1.0 - p)));
        }
    }
    r.n0 = log_odds0.size();
    r.n1 = log_odds1.size();
    const double n = static_cast<double>(probs.size());
    r.gamma = n > 0.0 ? static_cast<double>(r.n1) / n : 0.0;

    // p == 0.5 contributes a zero log-odds; an all-0.5 group has no finite estimate.
    if (r.n0 > 0) {
        double s = pairwise_sum(log_odds0);
        if (s > 0.0) r.alpha_hat = static_cast<double>(r.n0) / s;
    }
    if (r.n1 > 0) {
        double s = pairwise_sum(log_odds1);
        if (s > 0.0) r.beta_hat = static_cast<double>(r.n1) / s;
    }
    if (r.alpha_hat && r.beta_hat) r.eps_sum = *r.alpha_hat + *r.beta_hat;
    return r;
}

GofReport fit_alpha_beta_strict(std::span<const double> probs) {
    GofReport r = fit_alpha_beta(probs);
    if (r.one_sided()) {
        throw Error(ErrorKind::AllOneSided, "n0 = " + std::to_string(r.n0) + ", n1 = " + std::to_string(r.n1));
    }
    return r;
}

}  // namespace swapfit
