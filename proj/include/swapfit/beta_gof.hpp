#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>

namespace swapfit {

// Piecewise small-shape approximation of the Beta(alpha, beta) CDF:
//   (1-gamma) (x/(1-x))^alpha          for x <= 0.5
//   1 - gamma ((1-x)/x)^beta           for x >= 0.5
// with gamma = alpha / (alpha + beta). Throws DomainError outside [0, 1].
double volodin_cdf(double x, double alpha, double beta);

// Derivative of volodin_cdf; x = 0.5 uses the lower branch.
double volodin_pdf(double x, double alpha, double beta);

// Log-likelihood of the approximation with gamma fixed (the quantity the
// closed-form estimates maximise). Probabilities are clamped like fit_alpha_beta.
double volodin_log_likelihood(std::span<const double> probs, double alpha, double beta, double gamma);

inline constexpr std::size_t kHistogramBins = 20;
inline constexpr double kProbabilityClamp = 1e-12;

struct GofReport {
    std::optional<double> alpha_hat;  // absent when no probability is <= 0.5
    std::optional<double> beta_hat;   // absent when no probability is > 0.5
    double gamma = 0.0;               // n1 / n
    std::optional<double> eps_sum;    // alpha_hat + beta_hat
    std::size_t n0 = 0;
    std::size_t n1 = 0;
    std::size_t clamp_count = 0;
    std::array<std::size_t, kHistogramBins> histogram{};

    bool one_sided() const { return !alpha_hat || !beta_hat; }
};

// Closed-form estimates from probabilities of Z = 1. Values <= 0.5 form
// group 0. Never throws for one-sided input; check one_sided() (or use
// fit_alpha_beta_strict).
GofReport fit_alpha_beta(std::span<const double> probs);

// As fit_alpha_beta, but throws AllOneSided when either group is empty.
GofReport fit_alpha_beta_strict(std::span<const double> probs);

}  // namespace swapfit
